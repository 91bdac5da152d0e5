//! Sperner, KKM and KKMS solvers on subdivided simplices, and the
//! "nonzero boundary degree forces a balanced facet" checker.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Zero;
use rand::seq::SliceRandom;
use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::balanced::{self, BalancedProfile, IndexSet, PointConfig};
use crate::degree::{self, CoverSpec, DegreeResult, WeightedCover};
use crate::error::{Error, Result};
use crate::rational::{self, int, Rational, RationalVector};
use crate::simplicial::{self, OrientedTriangulation};

/// A triangulated `Δ^{n-1}` whose vertices know their carrier face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CarrierLabeledTriangulation {
    n: usize,
    tri: OrientedTriangulation,
    carriers: Vec<IndexSet>,
    boundary: OrientedTriangulation,
}

impl CarrierLabeledTriangulation {
    pub fn new(n: usize, tri: OrientedTriangulation, carriers: Vec<IndexSet>) -> Result<Self> {
        if n < 2 {
            return Err(Error::input("need n >= 2"));
        }
        if tri.dim() + 1 != n {
            return Err(Error::input(format!(
                "triangulation has dimension {}, expected {}",
                tri.dim(),
                n - 1
            )));
        }
        if carriers.len() != tri.vertex_count() {
            return Err(Error::input(format!(
                "{} carriers for {} vertices",
                carriers.len(),
                tri.vertex_count()
            )));
        }
        let mut carriers = carriers;
        for (u, c) in carriers.iter_mut().enumerate() {
            c.sort_unstable();
            c.dedup();
            if c.is_empty() || c.iter().any(|&i| i >= n) {
                return Err(Error::input(format!("vertex {}: bad carrier", u + 1)));
            }
        }
        let boundary = tri.boundary()?;
        Ok(CarrierLabeledTriangulation {
            n,
            tri,
            carriers,
            boundary,
        })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn tri(&self) -> &OrientedTriangulation {
        &self.tri
    }

    pub fn carriers(&self) -> &[IndexSet] {
        &self.carriers
    }

    pub fn boundary(&self) -> &OrientedTriangulation {
        &self.boundary
    }

    /// Splits one facet at its barycenter. The new vertex inherits the union
    /// of the facet's carriers; orientation is preserved.
    pub fn stellar_subdivide(&mut self, facet: usize) {
        let new = self.tri.vertex_count();
        let old = self.tri.facets()[facet].clone();
        let s = self.tri.signs()[facet];
        let carrier: BTreeSet<usize> = old.iter().flat_map(|&u| self.carriers[u].clone()).collect();
        self.carriers.push(carrier.into_iter().collect());

        let mut facets = self.tri.facets().to_vec();
        let mut signs = self.tri.signs().to_vec();
        for j in 0..old.len() {
            let mut f = old.clone();
            f[j] = new;
            if j == 0 {
                facets[facet] = f;
            } else {
                facets.push(f);
                signs.push(s);
            }
        }
        self.tri = OrientedTriangulation::with_signs(self.tri.dim(), new + 1, facets, Some(signs))
            .expect("stellar move keeps a valid triangulation");
    }
}

#[derive(Serialize, Deserialize)]
struct RawLabeled {
    n: usize,
    triangulation: OrientedTriangulation,
    carriers: Vec<Vec<usize>>,
}

impl Serialize for CarrierLabeledTriangulation {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        RawLabeled {
            n: self.n,
            triangulation: self.tri.clone(),
            carriers: balanced::to_one_based(&self.carriers),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for CarrierLabeledTriangulation {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let raw = RawLabeled::deserialize(d)?;
        let carriers = raw
            .carriers
            .iter()
            .map(|c| c.iter().map(|&i| i.wrapping_sub(1)).collect())
            .collect();
        CarrierLabeledTriangulation::new(raw.n, raw.triangulation, carriers).map_err(serde::de::Error::custom)
    }
}

fn permutations(k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(k - 1) {
        for pos in 0..=p.len() {
            let mut q = p.clone();
            q.insert(pos, k - 1);
            out.push(q);
        }
    }
    out
}

/// Freudenthal subdivision of `Δ^{n-1}` into `level^{n-1}` simplices.
///
/// Lattice points `level >= x_1 >= ... >= x_{n-1} >= 0`; the barycentric
/// coordinates are `(level - x_1, x_1 - x_2, ..., x_{n-1}) / level`.
pub fn lattice_subdivision(n: usize, level: usize) -> Result<CarrierLabeledTriangulation> {
    if n < 2 || level == 0 {
        return Err(Error::input("need n >= 2 and level >= 1"));
    }
    let d = n - 1;
    let big = level as i64;
    let inside = |x: &[i64]| {
        let mut prev = big;
        x.iter().all(|&c| {
            let ok = c <= prev && c >= 0;
            prev = c;
            ok
        })
    };
    let mut index: BTreeMap<Vec<i64>, usize> = BTreeMap::new();
    let mut points: Vec<Vec<i64>> = Vec::new();
    let mut stack = vec![Vec::new()];
    while let Some(p) = stack.pop() {
        if p.len() == d {
            points.push(p);
            continue;
        }
        let hi = p.last().copied().unwrap_or(big);
        for c in (0..=hi).rev() {
            let mut q = p.clone();
            q.push(c);
            stack.push(q);
        }
    }
    points.sort();
    for (i, p) in points.iter().enumerate() {
        index.insert(p.clone(), i);
    }

    let perms = permutations(d);
    let mut facets = Vec::new();
    let mut base = vec![0i64; d];
    loop {
        for perm in &perms {
            let mut v = base.clone();
            let mut simplex = vec![v.clone()];
            for &axis in perm {
                v[axis] += 1;
                simplex.push(v.clone());
            }
            if simplex.iter().all(|x| inside(x)) {
                facets.push(simplex.iter().map(|x| index[x]).collect::<Vec<_>>());
            }
        }
        // odometer over {0..level-1}^d
        let mut k = 0;
        while k < d {
            base[k] += 1;
            if base[k] < big {
                break;
            }
            base[k] = 0;
            k += 1;
        }
        if k == d {
            break;
        }
    }

    let coords: Vec<RationalVector> = points.iter().map(|p| p.iter().map(|&c| int(c)).collect()).collect();
    let carriers = points
        .iter()
        .map(|p| {
            let mut ext = vec![big];
            ext.extend_from_slice(p);
            ext.push(0);
            (0..n).filter(|&i| ext[i] > ext[i + 1]).collect()
        })
        .collect();
    let tri = OrientedTriangulation::oriented_by_coordinates(facets, &coords)?;
    CarrierLabeledTriangulation::new(n, tri, carriers)
}

/// Lattice subdivision followed by `stellar_steps` random barycentric splits.
pub fn random_subdivision<R: Rng>(
    n: usize,
    level: usize,
    stellar_steps: usize,
    rng: &mut R,
) -> Result<CarrierLabeledTriangulation> {
    let mut labeled = lattice_subdivision(n, level)?;
    for _ in 0..stellar_steps {
        let f = rng.gen_range(0..labeled.tri().len());
        labeled.stellar_subdivide(f);
    }
    Ok(labeled)
}

/// Corners of `Δ^{n-1}` in `R^{n-1}`: corner `i` has its first `i` coordinates 1.
pub fn simplex_corners(n: usize) -> Vec<RationalVector> {
    (0..n)
        .map(|i| (0..n - 1).map(|j| int((j < i) as i64)).collect())
        .collect()
}

fn barycenter(points: &[&RationalVector]) -> RationalVector {
    let k = Rational::from_integer(points.len().into());
    let mut acc = vec![Rational::zero(); points[0].len()];
    for p in points {
        acc = rational::add(&acc, p);
    }
    acc.iter().map(|x| x / &k).collect()
}

/// Corners of `Δ^{n-1}` with `r` at the barycenter: the only balanced set is `[n]`.
pub fn kkm_config(n: usize) -> PointConfig {
    let corners = simplex_corners(n);
    let r = barycenter(&corners.iter().collect::<Vec<_>>());
    PointConfig::new(n - 1, corners, r).expect("valid corner configuration")
}

/// Nonempty subsets of `[n]`, by size and then lexicographically.
pub fn kkms_subsets(n: usize) -> Vec<IndexSet> {
    let mut out: Vec<IndexSet> = (1u64..1 << n).map(balanced::set_of).collect();
    out.sort_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)));
    out
}

/// Points `v_I` = barycenter of face `Δ_I`, with `r` the barycenter of `Δ^{n-1}`.
pub fn kkms_config(n: usize) -> PointConfig {
    let corners = simplex_corners(n);
    let points = kkms_subsets(n)
        .iter()
        .map(|s| barycenter(&s.iter().map(|&i| &corners[i]).collect::<Vec<_>>()))
        .collect();
    let r = barycenter(&corners.iter().collect::<Vec<_>>());
    PointConfig::new(n - 1, points, r).expect("valid KKMS configuration")
}

/// Every vertex colored from its carrier.
pub fn check_sperner(labeled: &CarrierLabeledTriangulation, colors: &[usize]) -> bool {
    colors.len() == labeled.carriers().len()
        && colors
            .iter()
            .zip(labeled.carriers())
            .all(|(c, carrier)| carrier.contains(c))
}

pub fn random_sperner_coloring<R: Rng>(labeled: &CarrierLabeledTriangulation, rng: &mut R) -> Vec<usize> {
    labeled
        .carriers()
        .iter()
        .map(|c| *c.choose(rng).expect("nonempty carrier"))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Rainbow {
    pub facets: Vec<usize>,
    /// Σ orientation × parity of the color permutation over rainbow facets.
    pub signed_count: i64,
}

pub fn find_rainbow(tri: &OrientedTriangulation, colors: &[usize], n: usize) -> Result<Rainbow> {
    if colors.len() != tri.vertex_count() {
        return Err(Error::input("one color per vertex required"));
    }
    tri.boundary()?;
    let mut facets = Vec::new();
    let mut signed_count = 0i64;
    for (f, (facet, &s)) in tri.facets().iter().zip(tri.signs()).enumerate() {
        let cs: Vec<usize> = facet.iter().map(|&u| colors[u]).collect();
        let distinct: BTreeSet<usize> = cs.iter().copied().collect();
        if cs.len() == n && distinct.len() == n && distinct.iter().all(|&c| c < n) {
            facets.push(f);
            signed_count += (s * simplicial::permutation_parity(&cs)) as i64;
        }
    }
    Ok(Rainbow { facets, signed_count })
}

fn first_balanced_facet(
    tri: &OrientedTriangulation,
    cover: &WeightedCover,
    profile: &BalancedProfile,
) -> Result<Option<(usize, IndexSet, IndexSet)>> {
    let supports = (0..tri.len())
        .map(|f| degree::facet_support(tri, cover, f))
        .collect::<Result<Vec<_>>>()?;
    Ok((0..tri.len()).into_par_iter().find_map_first(|f| {
        profile
            .balanced_core_of(&supports[f])
            .map(|core| (f, supports[f].clone(), core))
    }))
}

fn check_carrier_condition(
    labeled: &CarrierLabeledTriangulation,
    cover: &WeightedCover,
    subsets: &[IndexSet],
) -> Result<()> {
    for u in 0..labeled.tri().vertex_count() {
        let carrier = &labeled.carriers()[u];
        for i in cover.support(u)? {
            if !subsets[i].iter().all(|j| carrier.contains(j)) {
                return Err(Error::input(format!(
                    "vertex {}: set {:?} is not inside its carrier {:?}",
                    u + 1,
                    subsets[i].iter().map(|j| j + 1).collect::<Vec<_>>(),
                    carrier.iter().map(|j| j + 1).collect::<Vec<_>>()
                )));
            }
        }
    }
    Ok(())
}

/// A facet met by all `n` sets of a KKM cover (one weight per corner).
pub fn kkm_witness(labeled: &CarrierLabeledTriangulation, cover: &WeightedCover) -> Result<(usize, IndexSet)> {
    let n = labeled.n();
    if cover.m() != n {
        return Err(Error::input(format!("KKM cover needs {n} sets, got {}", cover.m())));
    }
    let singletons: Vec<IndexSet> = (0..n).map(|i| vec![i]).collect();
    check_carrier_condition(labeled, cover, &singletons)?;
    let full = BalancedProfile::from_family(n, vec![(0..n).collect()])?;
    match first_balanced_facet(labeled.tri(), cover, &full)? {
        Some((f, support, _)) => Ok((f, support)),
        None => Err(Error::TheoremViolation(
            "no facet meets every set of a KKM cover".into(),
        )),
    }
}

#[derive(Clone, Debug)]
pub struct KkmsInstance {
    labeled: CarrierLabeledTriangulation,
    cover: WeightedCover,
    config: PointConfig,
    subsets: Vec<IndexSet>,
}

impl KkmsInstance {
    /// Cover indexed by [`kkms_subsets`]; each vertex may only use sets inside its carrier.
    pub fn new(labeled: CarrierLabeledTriangulation, cover: WeightedCover) -> Result<Self> {
        let n = labeled.n();
        let subsets = kkms_subsets(n);
        if cover.m() != subsets.len() {
            return Err(Error::input(format!(
                "KKMS cover needs {} sets, got {}",
                subsets.len(),
                cover.m()
            )));
        }
        check_carrier_condition(&labeled, &cover, &subsets)?;
        Ok(KkmsInstance {
            config: kkms_config(n),
            labeled,
            cover,
            subsets,
        })
    }

    pub fn labeled(&self) -> &CarrierLabeledTriangulation {
        &self.labeled
    }

    pub fn cover(&self) -> &WeightedCover {
        &self.cover
    }

    pub fn config(&self) -> &PointConfig {
        &self.config
    }

    pub fn subsets(&self) -> &[IndexSet] {
        &self.subsets
    }
}

/// Random compliant weights: every vertex spreads positive mass over a random
/// nonempty selection of the subsets of its carrier.
pub fn random_kkms_cover<R: Rng>(labeled: &CarrierLabeledTriangulation, rng: &mut R) -> WeightedCover {
    let subsets = kkms_subsets(labeled.n());
    let mut weights = BTreeMap::new();
    for (u, carrier) in labeled.carriers().iter().enumerate() {
        let allowed: Vec<usize> = (0..subsets.len())
            .filter(|&i| subsets[i].iter().all(|j| carrier.contains(j)))
            .collect();
        let mut chosen: Vec<usize> = allowed.iter().copied().filter(|_| rng.gen_bool(0.5)).collect();
        if chosen.is_empty() {
            chosen.push(*allowed.choose(rng).expect("carrier has a subset"));
        }
        let raw: Vec<i64> = chosen.iter().map(|_| rng.gen_range(1..=5)).collect();
        let total: i64 = raw.iter().sum();
        let mut w = vec![Rational::zero(); subsets.len()];
        for (&i, &x) in chosen.iter().zip(&raw) {
            w[i] = Rational::new(x.into(), total.into());
        }
        weights.insert(u, w);
    }
    WeightedCover::new(subsets.len(), weights).expect("normalized weights")
}

/// First facet (ascending) whose sets contain a balanced subfamily, with that subfamily.
pub fn kkms_witness(instance: &KkmsInstance) -> Result<(usize, Vec<IndexSet>)> {
    let profile = balanced::enumerate_minimal_balanced(instance.config())?;
    kkms_witness_with_profile(instance, &profile)
}

pub fn kkms_witness_with_profile(instance: &KkmsInstance, profile: &BalancedProfile) -> Result<(usize, Vec<IndexSet>)> {
    match first_balanced_facet(instance.labeled.tri(), &instance.cover, profile)? {
        Some((f, _, core)) => Ok((f, core.iter().map(|&i| instance.subsets[i].clone()).collect())),
        None => Err(Error::TheoremViolation(
            "no facet carries a balanced family of a KKMS cover".into(),
        )),
    }
}

pub fn kkms_boundary_degree(instance: &KkmsInstance, seed: u64) -> Result<DegreeResult> {
    degree::degree(instance.labeled.boundary(), &instance.cover, &instance.config, seed)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum TheoremBOutcome {
    /// Boundary degree nonzero (or undefined) and a balanced facet found.
    Witness {
        boundary_degree: Option<i64>,
        facet: usize,
        support: IndexSet,
        core: IndexSet,
    },
    /// Boundary degree zero: nothing is claimed.
    NoObstruction,
}

impl TheoremBOutcome {
    pub fn to_json(&self) -> Value {
        match self {
            TheoremBOutcome::Witness {
                boundary_degree,
                facet,
                support,
                core,
            } => json!({
                "status": "witness",
                "boundary_degree": boundary_degree.map_or(json!("N/A"), |k| json!(k)),
                "facet": facet + 1,
                "support": support.iter().map(|i| i + 1).collect::<Vec<_>>(),
                "balanced_core": core.iter().map(|i| i + 1).collect::<Vec<_>>(),
            }),
            TheoremBOutcome::NoObstruction => json!({
                "status": "no_obstruction",
                "boundary_degree": 0,
            }),
        }
    }
}

/// If the boundary degree of a cover on a triangulated `d`-ball is nonzero,
/// some facet of the ball must have balanced support; find it.
pub fn theorem_b_check(
    ball: &OrientedTriangulation,
    cover: &WeightedCover,
    config: &PointConfig,
    seed: u64,
) -> Result<TheoremBOutcome> {
    if ball.dim() != config.dim() {
        return Err(Error::input(format!(
            "ball has dimension {}, expected {}",
            ball.dim(),
            config.dim()
        )));
    }
    let boundary = ball.boundary()?;
    if !boundary.is_coherent_closed() {
        return Err(Error::input("boundary is not a closed pseudomanifold"));
    }
    let profile = balanced::enumerate_minimal_balanced(config)?;
    let boundary_degree = degree::degree_with_profile(&boundary, cover, config, &profile, seed)?.degree();
    if boundary_degree == Some(0) {
        return Ok(TheoremBOutcome::NoObstruction);
    }
    match first_balanced_facet(ball, cover, &profile)? {
        Some((facet, support, core)) => Ok(TheoremBOutcome::Witness {
            boundary_degree,
            facet,
            support,
            core,
        }),
        None => Err(Error::TheoremViolation(format!(
            "boundary degree {} but no balanced facet",
            boundary_degree.map_or("N/A".into(), |k| k.to_string())
        ))),
    }
}

/// Subdivision source inside an instance bundle.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum SubdivisionSpec {
    Builder {
        level: usize,
        #[serde(default)]
        stellar: usize,
    },
    Explicit {
        triangulation: OrientedTriangulation,
        carriers: Vec<Vec<usize>>,
    },
}

/// Instance bundle for the `sperner`, `kkm` and `kkms` commands.
///
/// Covers may be given as `coloring`, `weights` (vertex → vector), or for
/// KKMS as `labels` (one 1-based subset per vertex) or `set_weights`
/// (vertex → {"1,2": weight}); omitted covers are drawn from the seed.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceSpec {
    pub n: usize,
    pub subdivision: SubdivisionSpec,
    #[serde(default)]
    pub coloring: Option<Vec<usize>>,
    #[serde(default)]
    pub weights: Option<Value>,
    #[serde(default)]
    pub labels: Option<Vec<Vec<usize>>>,
    #[serde(default)]
    pub set_weights: Option<BTreeMap<String, BTreeMap<String, String>>>,
}

impl InstanceSpec {
    pub fn subdivision<R: Rng>(&self, rng: &mut R) -> Result<CarrierLabeledTriangulation> {
        match &self.subdivision {
            SubdivisionSpec::Builder { level, stellar } => random_subdivision(self.n, *level, *stellar, rng),
            SubdivisionSpec::Explicit {
                triangulation,
                carriers,
            } => {
                let zero = carriers
                    .iter()
                    .map(|c| c.iter().map(|&i| i.wrapping_sub(1)).collect())
                    .collect();
                CarrierLabeledTriangulation::new(self.n, triangulation.clone(), zero)
            }
        }
    }

    /// Cover over `m` sets; `None` when the bundle gives none.
    pub fn explicit_cover(&self, m: usize) -> Result<Option<WeightedCover>> {
        if let Some(c) = &self.coloring {
            let spec = CoverSpec::Coloring { coloring: c.clone() };
            return spec.into_cover(m).map(Some);
        }
        if let Some(w) = &self.weights {
            let spec: CoverSpec = serde_json::from_value(json!({ "weights": w }))?;
            return spec.into_cover(m).map(Some);
        }
        let subsets = kkms_subsets(self.n);
        let position = |set: &[usize]| -> Result<usize> {
            let mut s: Vec<usize> = set.iter().map(|&i| i.wrapping_sub(1)).collect();
            s.sort_unstable();
            s.dedup();
            subsets
                .iter()
                .position(|t| *t == s)
                .ok_or_else(|| Error::input(format!("{set:?} is not a nonempty subset of [{}]", self.n)))
        };
        if let Some(labels) = &self.labels {
            let colors = labels.iter().map(|l| position(l)).collect::<Result<Vec<_>>>()?;
            return WeightedCover::from_coloring(m, &colors).map(Some);
        }
        if let Some(sw) = &self.set_weights {
            let mut weights = BTreeMap::new();
            for (u, entries) in sw {
                let id: usize = u
                    .parse()
                    .ok()
                    .filter(|&x| x > 0)
                    .ok_or_else(|| Error::input(format!("bad vertex id {u:?}")))?;
                let mut w = vec![Rational::zero(); m];
                for (set, x) in entries {
                    let members = set
                        .split(',')
                        .map(|t| t.trim().parse::<usize>())
                        .collect::<std::result::Result<Vec<_>, _>>()
                        .map_err(|_| Error::input(format!("bad subset {set:?}")))?;
                    w[position(&members)?] = rational::parse_rational(x)?;
                }
                weights.insert(id - 1, w);
            }
            return WeightedCover::new(m, weights).map(Some);
        }
        Ok(None)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ivec, ratio};
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Δ^2 with one interior vertex coned to the corners.
    fn coned_triangle() -> CarrierLabeledTriangulation {
        let coords = vec![ivec(&[0, 0]), ivec(&[3, 0]), ivec(&[0, 3]), ivec(&[1, 1])];
        let tri =
            OrientedTriangulation::oriented_by_coordinates(vec![vec![0, 1, 3], vec![1, 2, 3], vec![2, 0, 3]], &coords)
                .unwrap();
        CarrierLabeledTriangulation::new(3, tri, vec![vec![0], vec![1], vec![2], vec![0, 1, 2]]).unwrap()
    }

    #[test]
    fn lattice_counts() {
        for (n, level) in [(2, 1), (2, 4), (3, 1), (3, 3), (4, 2)] {
            let l = lattice_subdivision(n, level).unwrap();
            assert_eq!(l.tri().len(), level.pow(n as u32 - 1));
            assert!(l.boundary().is_coherent_closed());
        }
        let l = lattice_subdivision(3, 2).unwrap();
        assert_eq!(l.tri().vertex_count(), 6);
        assert_eq!(l.boundary().len(), 6);
        let corners = l.carriers().iter().filter(|c| c.len() == 1).count();
        assert_eq!(corners, 3);
    }

    #[test]
    fn sperner_checks() {
        let l = coned_triangle();
        assert!(check_sperner(&l, &[0, 1, 2, 0]));
        assert!(check_sperner(&l, &[0, 1, 2, 2]));
        let edge = lattice_subdivision(3, 2).unwrap();
        let mut colors: Vec<usize> = edge.carriers().iter().map(|c| c[0]).collect();
        assert!(check_sperner(&edge, &colors));
        let mid = edge.carriers().iter().position(|c| c == &vec![0, 1]).unwrap();
        colors[mid] = 2;
        assert!(!check_sperner(&edge, &colors));
    }

    #[test]
    fn coned_rainbow() {
        let l = coned_triangle();
        let r = find_rainbow(l.tri(), &[0, 1, 2, 0], 3).unwrap();
        assert_eq!(r.facets, vec![1]);
        assert_eq!(r.signed_count.abs(), 1);
    }

    #[test]
    fn rainbow_parity_on_random_instances() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..10 {
            let l = random_subdivision(3, 4, 8, &mut rng).unwrap();
            let colors = random_sperner_coloring(&l, &mut rng);
            assert!(check_sperner(&l, &colors));
            let r = find_rainbow(l.tri(), &colors, 3).unwrap();
            assert_eq!(r.facets.len() % 2, 1);
            assert_eq!(r.signed_count.abs(), 1);
        }
    }

    #[test]
    fn incoherent_rainbow_input() {
        let tri = OrientedTriangulation::new(2, 4, vec![vec![0, 1, 2], vec![0, 1, 3]]).unwrap();
        assert!(matches!(find_rainbow(&tri, &[0, 1, 2, 2], 3), Err(Error::Input(_))));
    }

    #[test]
    fn kkm_on_lattice() {
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        let l = lattice_subdivision(3, 3).unwrap();
        let colors = random_sperner_coloring(&l, &mut rng);
        let cover = WeightedCover::from_coloring(3, &colors).unwrap();
        let (f, support) = kkm_witness(&l, &cover).unwrap();
        assert_eq!(support, vec![0, 1, 2]);
        assert!(find_rainbow(l.tri(), &colors, 3).unwrap().facets.contains(&f));
        let bad = WeightedCover::from_coloring(3, &vec![2; l.tri().vertex_count()]).unwrap();
        assert!(matches!(kkm_witness(&l, &bad), Err(Error::Input(_))));
    }

    #[test]
    fn kkms_geometry() {
        let cfg = kkms_config(3);
        assert_eq!(cfg.len(), 7);
        assert_eq!(kkms_subsets(3)[6], vec![0, 1, 2]);
        assert_eq!(cfg.points()[6], cfg.base().to_vec());
        assert_eq!(kkms_config(2).points()[2], vec![ratio(1, 2)]);
    }

    #[test]
    fn kkms_segment_examples() {
        let l = lattice_subdivision(2, 2).unwrap();
        // vertex order: x = 0, 1, 2 with carriers {1}, {1,2}, {2}
        let cover = WeightedCover::from_coloring(3, &[0, 2, 1]).unwrap();
        let inst = KkmsInstance::new(l.clone(), cover).unwrap();
        let (f, s) = kkms_witness(&inst).unwrap();
        assert!(l.tri().facets()[f].contains(&1));
        assert_eq!(s, vec![vec![0, 1]]);
        assert_eq!(kkms_boundary_degree(&inst, 0).unwrap().degree().map(i64::abs), Some(1));

        let l = lattice_subdivision(2, 3).unwrap();
        let cover = WeightedCover::from_coloring(3, &[0, 0, 1, 1]).unwrap();
        let inst = KkmsInstance::new(l.clone(), cover).unwrap();
        let (f, s) = kkms_witness(&inst).unwrap();
        let mut mid = l.tri().facets()[f].clone();
        mid.sort();
        assert_eq!(mid, vec![1, 2]);
        assert_eq!(s, vec![vec![0], vec![1]]);
    }

    #[test]
    fn kkms_random() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        for n in [2, 3] {
            let profile = balanced::enumerate_minimal_balanced(&kkms_config(n)).unwrap();
            for _ in 0..5 {
                let l = random_subdivision(n, 3, 5, &mut rng).unwrap();
                let cover = random_kkms_cover(&l, &mut rng);
                let inst = KkmsInstance::new(l, cover).unwrap();
                kkms_witness_with_profile(&inst, &profile).unwrap();
                let deg = kkms_boundary_degree(&inst, 1).unwrap();
                assert_eq!(deg.degree().map(i64::abs), Some(1));
            }
        }
    }

    #[test]
    fn kkms_singleton_weights_find_rainbow() {
        let l = lattice_subdivision(3, 2).unwrap();
        let colors: Vec<usize> = l.carriers().iter().map(|c| *c.last().unwrap()).collect();
        let inst = KkmsInstance::new(l, WeightedCover::from_coloring(7, &colors).unwrap()).unwrap();
        let (_, s) = kkms_witness(&inst).unwrap();
        assert_eq!(s, vec![vec![0], vec![1], vec![2]]);
    }

    #[test]
    fn kkms_rejects_noncompliant() {
        let l = lattice_subdivision(2, 1).unwrap();
        let cover = WeightedCover::from_coloring(3, &[1, 1]).unwrap();
        assert!(matches!(KkmsInstance::new(l, cover), Err(Error::Input(_))));
    }

    fn grid_disk() -> OrientedTriangulation {
        // 3x3 lattice, vertex (i, j) has id 3j + i
        let coords: Vec<RationalVector> = (0..9).map(|v| ivec(&[v % 3, v / 3])).collect();
        let mut facets = Vec::new();
        for j in 0..2 {
            for i in 0..2 {
                let a = 3 * j + i;
                facets.push(vec![a, a + 1, a + 4]);
                facets.push(vec![a, a + 4, a + 3]);
            }
        }
        OrientedTriangulation::oriented_by_coordinates(facets, &coords).unwrap()
    }

    #[test]
    fn theorem_b_square() {
        let sq = PointConfig::from_ints(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[0, 0]).unwrap();
        // boundary counterclockwise from (0,0): 3,4,4,1,1,2,2,3 (1-based); center 1
        let colors = [2, 3, 3, 2, 0, 0, 1, 1, 0];
        let cover = WeightedCover::from_coloring(4, &colors).unwrap();
        match theorem_b_check(&grid_disk(), &cover, &sq, 0).unwrap() {
            TheoremBOutcome::Witness {
                boundary_degree, core, ..
            } => {
                assert_eq!(boundary_degree, Some(1));
                assert!(core == vec![0, 2] || core == vec![1, 3]);
            }
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn theorem_b_kkm_and_zero() {
        let cfg = kkm_config(3);
        let l = lattice_subdivision(3, 3).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(9);
        let colors = random_sperner_coloring(&l, &mut rng);
        let cover = WeightedCover::from_coloring(3, &colors).unwrap();
        match theorem_b_check(l.tri(), &cover, &cfg, 3).unwrap() {
            TheoremBOutcome::Witness { support, .. } => assert_eq!(support, vec![0, 1, 2]),
            other => panic!("{other:?}"),
        }
        let two = WeightedCover::from_coloring(3, &vec![0; l.tri().vertex_count()]).unwrap();
        assert_eq!(
            theorem_b_check(l.tri(), &two, &cfg, 3).unwrap(),
            TheoremBOutcome::NoObstruction
        );
    }

    #[test]
    fn instance_bundles() {
        let spec: InstanceSpec = serde_json::from_str(
            r#"{"n":2,"subdivision":{"level":2},"set_weights":{"1":{"1":"1"},"2":{"1,2":"1"},"3":{"2":"1"}}}"#,
        )
        .unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let l = spec.subdivision(&mut rng).unwrap();
        let cover = spec.explicit_cover(3).unwrap().unwrap();
        assert_eq!(cover.color(1), Some(2));
        KkmsInstance::new(l, cover).unwrap();
        let spec: InstanceSpec =
            serde_json::from_str(r#"{"n":2,"subdivision":{"level":1},"labels":[[1],[2,1]]}"#).unwrap();
        assert_eq!(spec.explicit_cover(3).unwrap().unwrap().color(1), Some(2));
        assert!(serde_json::from_str::<InstanceSpec>(r#"{"n":2,"subdivision":{"level":1},"bogus":1}"#).is_err());
    }
}
