//! Degree of a weighted cover on a closed oriented `(d-1)`-manifold relative
//! to a configuration `(V, r)`.
//!
//! The cover enters as partition-of-unity samples at triangulation vertices;
//! the induced PL map sends a vertex `u` to `q_u = Σ_i w_i(u) v_i`. Instead of
//! normalizing onto the unit sphere, the degree is read off as the signed
//! number of facets crossed by one generic ray from `r`, which keeps every
//! step rational.

use std::collections::BTreeMap;

use num_traits::{One, Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::{json, Value};

use crate::balanced::{self, BalancedProfile, IndexSet, PointConfig};
use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::rational::{self, int, Rational, RationalVector};
use crate::simplicial::{self, OrientedTriangulation};

/// Ray directions are drawn with integer coordinates in `[-RAY_RANGE, RAY_RANGE]`.
pub const RAY_RANGE: i64 = 1_000_000;
pub const MAX_RAY_RETRIES: usize = 64;

/// Rational partition-of-unity samples, one weight vector over `[m]` per vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct WeightedCover {
    m: usize,
    weights: BTreeMap<usize, RationalVector>,
}

impl WeightedCover {
    pub fn new(m: usize, weights: BTreeMap<usize, RationalVector>) -> Result<Self> {
        for (u, w) in &weights {
            if w.len() != m {
                return Err(Error::input(format!(
                    "vertex {}: weight vector has {} entries, expected {m}",
                    u + 1,
                    w.len()
                )));
            }
            if w.iter().any(|x| x.is_negative()) {
                return Err(Error::input(format!("vertex {}: negative weight", u + 1)));
            }
            if w.iter().sum::<Rational>() != Rational::one() {
                return Err(Error::input(format!("vertex {}: weights do not sum to 1", u + 1)));
            }
        }
        Ok(WeightedCover { m, weights })
    }

    /// Unit weight vectors: vertex `u` belongs only to set `colors[u]` (0-based).
    pub fn from_coloring(m: usize, colors: &[usize]) -> Result<Self> {
        let mut weights = BTreeMap::new();
        for (u, &c) in colors.iter().enumerate() {
            if c >= m {
                return Err(Error::input(format!(
                    "vertex {}: color {} out of range 1..={m}",
                    u + 1,
                    c + 1
                )));
            }
            let mut w = vec![Rational::zero(); m];
            w[c] = Rational::one();
            weights.insert(u, w);
        }
        Ok(WeightedCover { m, weights })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn weights(&self, vertex: usize) -> Option<&RationalVector> {
        self.weights.get(&vertex)
    }

    pub fn vertices(&self) -> impl Iterator<Item = usize> + '_ {
        self.weights.keys().copied()
    }

    pub fn support(&self, vertex: usize) -> Result<IndexSet> {
        let w = self
            .weights
            .get(&vertex)
            .ok_or_else(|| Error::input(format!("vertex {} has no weight vector", vertex + 1)))?;
        Ok((0..self.m).filter(|&i| !w[i].is_zero()).collect())
    }

    /// The single color of a vertex whose weight vector is a unit vector.
    pub fn color(&self, vertex: usize) -> Option<usize> {
        let s = self.support(vertex).ok()?;
        (s.len() == 1).then(|| s[0])
    }

    /// `q_u = Σ_i w_i(u) v_i`.
    pub fn image(&self, vertex: usize, config: &PointConfig) -> Result<RationalVector> {
        let w = self
            .weights
            .get(&vertex)
            .ok_or_else(|| Error::input(format!("vertex {} has no weight vector", vertex + 1)))?;
        let mut q = vec![Rational::zero(); config.dim()];
        for (wi, v) in w.iter().zip(config.points()) {
            if wi.is_zero() {
                continue;
            }
            for (qk, vk) in q.iter_mut().zip(v) {
                *qk += wi * vk;
            }
        }
        Ok(q)
    }

    /// Same cover with the point indices permuted: set `i` becomes set `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Self {
        let weights = self
            .weights
            .iter()
            .map(|(&u, w)| {
                let mut out = vec![Rational::zero(); self.m];
                for (i, x) in w.iter().enumerate() {
                    out[perm[i]] = x.clone();
                }
                (u, out)
            })
            .collect();
        WeightedCover { m: self.m, weights }
    }
}

#[derive(Serialize, Deserialize)]
#[serde(transparent)]
struct WeightVector(#[serde(with = "rational::serde_vector")] RationalVector);

/// JSON form of a cover: `{"coloring": [...]}` with 1-based colors, or
/// `{"weights": {"1": ["1/2", "1/2", "0"], ...}}` keyed by 1-based vertex id.
#[derive(Deserialize)]
#[serde(untagged)]
pub enum CoverSpec {
    Coloring {
        coloring: Vec<usize>,
    },
    Weights {
        weights: BTreeMap<String, WeightVectorSpec>,
    },
}

#[derive(Deserialize)]
#[serde(transparent)]
pub struct WeightVectorSpec(WeightVector);

impl CoverSpec {
    pub fn into_cover(self, m: usize) -> Result<WeightedCover> {
        match self {
            CoverSpec::Coloring { coloring } => {
                if coloring.contains(&0) {
                    return Err(Error::input("colors are 1-based"));
                }
                let zero: Vec<usize> = coloring.iter().map(|c| c - 1).collect();
                WeightedCover::from_coloring(m, &zero)
            }
            CoverSpec::Weights { weights } => {
                let mut map = BTreeMap::new();
                for (k, v) in weights {
                    let id: usize = k.parse().map_err(|_| Error::input(format!("bad vertex id {k:?}")))?;
                    if id == 0 {
                        return Err(Error::input("vertex ids are 1-based"));
                    }
                    map.insert(id - 1, v.0 .0);
                }
                WeightedCover::new(m, map)
            }
        }
    }
}

impl Serialize for WeightedCover {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        let all_colors: Option<Vec<usize>> = (0..self.weights.len()).map(|u| self.color(u).map(|c| c + 1)).collect();
        let dense = self.weights.keys().copied().eq(0..self.weights.len());
        match all_colors {
            Some(coloring) if dense => json!({ "coloring": coloring }).serialize(s),
            _ => {
                let weights: BTreeMap<String, Vec<String>> = self
                    .weights
                    .iter()
                    .map(|(u, w)| ((u + 1).to_string(), rational::format_vector(w)))
                    .collect();
                json!({ "weights": weights }).serialize(s)
            }
        }
    }
}

/// Union of the vertex supports over one facet: the nerve simplex it maps into.
pub fn facet_support(tri: &OrientedTriangulation, cover: &WeightedCover, facet: usize) -> Result<IndexSet> {
    let f = tri
        .facets()
        .get(facet)
        .ok_or_else(|| Error::input(format!("no facet {}", facet + 1)))?;
    let mut mask = 0u64;
    for &u in f {
        mask |= balanced::mask_of(&cover.support(u)?);
    }
    Ok(balanced::set_of(mask))
}

/// First facet (in facet order) whose support is `r`-balanced.
pub fn check_no_balanced_simplices(
    tri: &OrientedTriangulation,
    cover: &WeightedCover,
    profile: &BalancedProfile,
) -> Result<Option<(usize, IndexSet)>> {
    for f in 0..tri.len() {
        let support = facet_support(tri, cover, f)?;
        if profile.is_balanced(&support)? {
            return Ok(Some((f, support)));
        }
    }
    Ok(None)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Crossing {
    pub facet: usize,
    pub t: Rational,
    pub barycentric: RationalVector,
    pub sign: i32,
}

/// Exact witness for a degree: a ray `r + t w` and every facet it crosses.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RayCertificate {
    pub direction: RationalVector,
    pub crossings: Vec<Crossing>,
}

impl RayCertificate {
    pub fn degree(&self) -> i64 {
        self.crossings.iter().map(|c| c.sign as i64).sum()
    }

    /// Re-checks every crossing by substitution.
    pub fn verify(&self, tri: &OrientedTriangulation, cover: &WeightedCover, config: &PointConfig) -> Result<bool> {
        for c in &self.crossings {
            if !c.t.is_positive()
                || c.barycentric.iter().any(|m| !m.is_positive())
                || c.barycentric.iter().sum::<Rational>() != Rational::one()
            {
                return Ok(false);
            }
            let facet = &tri.facets()[c.facet];
            let mut lhs = vec![Rational::zero(); config.dim()];
            for (mu, &u) in c.barycentric.iter().zip(facet) {
                lhs = rational::add(&lhs, &rational::scale(&cover.image(u, config)?, mu));
            }
            let rhs = rational::add(config.base(), &rational::scale(&self.direction, &c.t));
            if lhs != rhs {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum DegreeResult {
    Ok {
        degree: i64,
        certificate: RayCertificate,
    },
    /// A facet whose support is balanced; the degree is undefined.
    BalancedSimplexFound {
        facet: usize,
        support: IndexSet,
    },
}

impl DegreeResult {
    pub fn degree(&self) -> Option<i64> {
        match self {
            DegreeResult::Ok { degree, .. } => Some(*degree),
            DegreeResult::BalancedSimplexFound { .. } => None,
        }
    }

    pub fn is_na(&self) -> bool {
        matches!(self, DegreeResult::BalancedSimplexFound { .. })
    }

    pub fn to_json(&self) -> Value {
        match self {
            DegreeResult::Ok { degree, certificate } => json!({
                "status": "ok",
                "degree": degree,
                "direction": rational::format_vector(&certificate.direction),
                "crossings": certificate.crossings.iter().map(|c| json!({
                    "facet": c.facet + 1,
                    "t": rational::format_rational(&c.t),
                    "barycentric": rational::format_vector(&c.barycentric),
                    "sign": c.sign,
                })).collect::<Vec<_>>(),
            }),
            DegreeResult::BalancedSimplexFound { facet, support } => json!({
                "status": "balanced_witness",
                "facet": facet + 1,
                "support": support.iter().map(|i| i + 1).collect::<Vec<_>>(),
            }),
        }
    }
}

enum Cast {
    Miss,
    Hit(Crossing),
    Degenerate,
}

fn cast_facet(facet_id: usize, images: &[&RationalVector], facet_sign: i8, r: &[Rational], w: &[Rational]) -> Cast {
    let d = r.len();
    // unknowns (μ_0..μ_{d-1}, t):  Σ μ_j q_j − t w = r,  Σ μ_j = 1
    let mut rows: Vec<RationalVector> = (0..d)
        .map(|k| {
            let mut row: RationalVector = images.iter().map(|q| q[k].clone()).collect();
            row.push(-&w[k]);
            row
        })
        .collect();
    let mut last = vec![Rational::one(); images.len()];
    last.push(Rational::zero());
    rows.push(last);
    let mut rhs = r.to_vec();
    rhs.push(Rational::one());

    let Some(x) = rational::solve(&rows, &rhs) else {
        // Singular: the ray is parallel to the image simplex or the image is flat.
        // Degenerate exactly when the closed ray still meets the image.
        return match lp::feasible(&rows, &rhs) {
            LpOutcome::Optimal { .. } => Cast::Degenerate,
            _ => Cast::Miss,
        };
    };
    let (mu, t) = x.split_at(d);
    let t = &t[0];
    if t.is_negative() || mu.iter().any(|m| m.is_negative()) {
        return Cast::Miss;
    }
    if t.is_zero() || mu.iter().any(|m| m.is_zero()) {
        return Cast::Degenerate;
    }
    let mut frame: Vec<RationalVector> = vec![w.to_vec()];
    frame.extend(images[1..].iter().map(|q| rational::sub(q, images[0])));
    let orient = rational::sign(&rational::determinant(frame));
    Cast::Hit(Crossing {
        facet: facet_id,
        t: t.clone(),
        barycentric: mu.to_vec(),
        sign: orient * facet_sign as i32,
    })
}

fn random_direction(rng: &mut ChaCha8Rng, d: usize) -> RationalVector {
    loop {
        let w: Vec<i64> = (0..d).map(|_| rng.gen_range(-RAY_RANGE..=RAY_RANGE)).collect();
        if w.iter().any(|&x| x != 0) {
            return w.into_iter().map(int).collect();
        }
    }
}

/// Signed ray-crossing count along a given direction; `None` when the ray is not generic.
pub fn degree_along(
    tri: &OrientedTriangulation,
    cover: &WeightedCover,
    config: &PointConfig,
    direction: &[Rational],
) -> Result<Option<RayCertificate>> {
    let mut images: BTreeMap<usize, RationalVector> = BTreeMap::new();
    for f in tri.facets() {
        for &u in f {
            if let std::collections::btree_map::Entry::Vacant(e) = images.entry(u) {
                e.insert(cover.image(u, config)?);
            }
        }
    }
    let casts: Vec<Cast> = tri
        .facets()
        .par_iter()
        .zip(tri.signs().par_iter())
        .enumerate()
        .map(|(i, (f, &s))| {
            let qs: Vec<&RationalVector> = f.iter().map(|u| &images[u]).collect();
            cast_facet(i, &qs, s, config.base(), direction)
        })
        .collect();
    let mut crossings = Vec::new();
    for c in casts {
        match c {
            Cast::Miss => {}
            Cast::Hit(x) => crossings.push(x),
            Cast::Degenerate => return Ok(None),
        }
    }
    Ok(Some(RayCertificate {
        direction: direction.to_vec(),
        crossings,
    }))
}

fn check_degree_inputs(tri: &OrientedTriangulation, cover: &WeightedCover, config: &PointConfig) -> Result<()> {
    if tri.dim() + 1 != config.dim() {
        return Err(Error::input(format!(
            "triangulation has dimension {}, expected {} for points in R^{}",
            tri.dim(),
            config.dim() - 1,
            config.dim()
        )));
    }
    if cover.m() != config.len() {
        return Err(Error::input(format!(
            "cover is indexed by {} sets but the configuration has {} points",
            cover.m(),
            config.len()
        )));
    }
    Ok(())
}

pub fn degree(
    tri: &OrientedTriangulation,
    cover: &WeightedCover,
    config: &PointConfig,
    seed: u64,
) -> Result<DegreeResult> {
    let profile = balanced::enumerate_minimal_balanced(config)?;
    degree_with_profile(tri, cover, config, &profile, seed)
}

pub fn degree_with_profile(
    tri: &OrientedTriangulation,
    cover: &WeightedCover,
    config: &PointConfig,
    profile: &BalancedProfile,
    seed: u64,
) -> Result<DegreeResult> {
    check_degree_inputs(tri, cover, config)?;
    if !simplicial::orientation_coherence_check(tri) {
        return Err(Error::input(
            "triangulation is not a coherently oriented closed pseudomanifold",
        ));
    }
    cast_with_retries(tri, cover, config, profile, seed)
}

/// Like [`degree_with_profile`] but only asks for a cycle: faces may be shared
/// by more than two facets as long as signed incidences cancel.
pub fn degree_of_cycle(
    tri: &OrientedTriangulation,
    cover: &WeightedCover,
    config: &PointConfig,
    profile: &BalancedProfile,
    seed: u64,
) -> Result<DegreeResult> {
    check_degree_inputs(tri, cover, config)?;
    if !tri.is_cycle() {
        return Err(Error::input("triangulation is not a cycle"));
    }
    cast_with_retries(tri, cover, config, profile, seed)
}

fn cast_with_retries(
    tri: &OrientedTriangulation,
    cover: &WeightedCover,
    config: &PointConfig,
    profile: &BalancedProfile,
    seed: u64,
) -> Result<DegreeResult> {
    if let Some((facet, support)) = check_no_balanced_simplices(tri, cover, profile)? {
        return Ok(DegreeResult::BalancedSimplexFound { facet, support });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..MAX_RAY_RETRIES {
        let w = random_direction(&mut rng, config.dim());
        if let Some(certificate) = degree_along(tri, cover, config, &w)? {
            return Ok(DegreeResult::Ok {
                degree: certificate.degree(),
                certificate,
            });
        }
    }
    Err(Error::Genericity {
        retries: MAX_RAY_RETRIES,
    })
}

/// Winding number of the image loop of a 1-cycle around `r` in the plane.
///
/// Counts signed crossings of the horizontal ray to the right of `r`, with
/// vertices on the ray's line treated as lying above it. Deterministic.
pub fn winding_oracle(tri: &OrientedTriangulation, cover: &WeightedCover, config: &PointConfig) -> Result<i64> {
    if config.dim() != 2 || tri.dim() != 1 {
        return Err(Error::input("winding oracle needs a 1-cycle and points in the plane"));
    }
    let r = config.base();
    let mut winding = 0i64;
    for (f, &s) in tri.facets().iter().zip(tri.signs()) {
        let (mut a, mut b) = (cover.image(f[0], config)?, cover.image(f[1], config)?);
        if s < 0 {
            std::mem::swap(&mut a, &mut b);
        }
        let cross = (&b[0] - &a[0]) * (&r[1] - &a[1]) - (&r[0] - &a[0]) * (&b[1] - &a[1]);
        if cross.is_zero() {
            let within = |k: usize| {
                let (lo, hi) = if a[k] <= b[k] { (&a[k], &b[k]) } else { (&b[k], &a[k]) };
                *lo <= r[k] && r[k] <= *hi
            };
            if within(0) && within(1) {
                return Err(Error::Oracle(format!(
                    "image of edge ({}, {}) passes through r",
                    f[0] + 1,
                    f[1] + 1
                )));
            }
        }
        if a[1] <= r[1] {
            if b[1] > r[1] && cross.is_positive() {
                winding += 1;
            }
        } else if b[1] <= r[1] && cross.is_negative() {
            winding -= 1;
        }
    }
    Ok(winding)
}

/// True iff both configurations give the same `|deg|` (or both give N/A).
pub fn degree_invariance_check(
    a: &PointConfig,
    b: &PointConfig,
    tri: &OrientedTriangulation,
    cover: &WeightedCover,
    seed: u64,
) -> Result<bool> {
    let pa = balanced::enumerate_minimal_balanced(a)?;
    let pb = balanced::enumerate_minimal_balanced(b)?;
    if a.len() != b.len() || pa != pb {
        return Err(Error::input("configurations are not BS-equivalent"));
    }
    let da = degree_with_profile(tri, cover, a, &pa, seed)?;
    let db = degree_with_profile(tri, cover, b, &pb, seed)?;
    Ok(match (da.degree(), db.degree()) {
        (Some(x), Some(y)) => x.abs() == y.abs(),
        (None, None) => true,
        _ => false,
    })
}

/// Indices of points `≠ r` sorted counterclockwise by angle around `r`,
/// starting from the positive x-axis. Ties keep index order.
pub fn angular_order(config: &PointConfig) -> Vec<usize> {
    let r = config.base();
    let dirs: Vec<(usize, RationalVector)> = (0..config.len())
        .map(|i| (i, rational::sub(&config.points()[i], r)))
        .filter(|(_, v)| v.iter().any(|x| !x.is_zero()))
        .collect();
    let half = |v: &RationalVector| -> u8 {
        if v[1].is_positive() || (v[1].is_zero() && v[0].is_positive()) {
            0
        } else {
            1
        }
    };
    let mut order = dirs.clone();
    order.sort_by(|(i, a), (j, b)| {
        half(a).cmp(&half(b)).then_with(|| {
            let cross = &a[0] * &b[1] - &a[1] * &b[0];
            if cross.is_positive() {
                std::cmp::Ordering::Less
            } else if cross.is_negative() {
                std::cmp::Ordering::Greater
            } else {
                i.cmp(j)
            }
        })
    });
    order.into_iter().map(|(i, _)| i).collect()
}

/// A colored cycle whose degree relative to a planar `(V, r)` is exactly `k`.
pub fn construct_degree_k_circle(config: &PointConfig, k: i64) -> Result<(OrientedTriangulation, WeightedCover)> {
    if config.dim() != 2 {
        return Err(Error::input("circle construction needs points in the plane"));
    }
    if config.rank() < 2 {
        return Err(Error::input("configuration must have affine rank 2"));
    }
    if !config.base_in_relint() {
        return Err(Error::input("r must lie in the interior of conv(V)"));
    }
    let order = angular_order(config);
    if k == 0 {
        let tri = OrientedTriangulation::new(1, 2, vec![vec![0, 1], vec![1, 0]])?;
        let cover = WeightedCover::from_coloring(config.len(), &[order[0], order[0]])?;
        return Ok((tri, cover));
    }
    let n = order.len() * k.unsigned_abs() as usize;
    let facets = (0..n)
        .map(|i| {
            if k > 0 {
                vec![i, (i + 1) % n]
            } else {
                vec![(i + 1) % n, i]
            }
        })
        .collect();
    let colors: Vec<usize> = (0..n).map(|i| order[i % order.len()]).collect();
    Ok((
        OrientedTriangulation::new(1, n, facets)?,
        WeightedCover::from_coloring(config.len(), &colors)?,
    ))
}
