//! Balanced components of weight-field covers on a box, their indices, and
//! the check that the indices add up to the degree on the box boundary.
//!
//! The box `[lower, upper] ⊂ R^n` (n = 2 or 3) is cut into `resolution^n`
//! cells, each split into `n!` Kuhn simplices. A facet is singular when the
//! union of its vertex supports is balanced. Singular facets are grouped so
//! that the closed-star neighborhoods of different groups never share a
//! facet, even after one more ring of growth; each group's index is the
//! degree of the cover on the boundary of its neighborhood.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt::Write as _;

use num_traits::{ToPrimitive, Zero};
use rand::Rng;
use rayon::prelude::*;
use serde::Deserialize;
use serde_json::{json, Value};

use crate::balanced::{self, BalancedProfile, PointConfig};
use crate::degree::{self, CoverSpec, DegreeResult, WeightedCover};
use crate::error::{Error, Result};
use crate::geometry;
use crate::rational::{self, int, Rational, RationalVector};
use crate::simplicial::OrientedTriangulation;

#[derive(Clone, Debug)]
pub struct GridCover {
    n: usize,
    lower: RationalVector,
    upper: RationalVector,
    resolution: usize,
    cover: WeightedCover,
    tri: OrientedTriangulation,
    vertex_facets: Vec<Vec<usize>>,
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

impl GridCover {
    pub fn new(
        n: usize,
        lower: RationalVector,
        upper: RationalVector,
        resolution: usize,
        cover: WeightedCover,
    ) -> Result<Self> {
        if n != 2 && n != 3 {
            return Err(Error::input("grid dimension must be 2 or 3"));
        }
        if lower.len() != n || upper.len() != n || lower.iter().zip(&upper).any(|(a, b)| a >= b) {
            return Err(Error::input(
                "box corners must satisfy lower < upper in every coordinate",
            ));
        }
        if resolution == 0 {
            return Err(Error::input("resolution must be positive"));
        }
        let count = (resolution + 1).pow(n as u32);
        if cover.vertices().count() != count || cover.vertices().last() != Some(count - 1) {
            return Err(Error::input(format!(
                "grid has {count} vertices; every one needs a weight vector"
            )));
        }
        let tri = kuhn_triangulation(n, resolution);
        let mut vertex_facets = vec![Vec::new(); count];
        for (f, facet) in tri.facets().iter().enumerate() {
            for &u in facet {
                vertex_facets[u].push(f);
            }
        }
        Ok(GridCover {
            n,
            lower,
            upper,
            resolution,
            cover,
            tri,
            vertex_facets,
        })
    }

    /// Grid whose vertex at position `p` gets the unit weight `color(p)`.
    pub fn from_coloring_fn(
        n: usize,
        lower: RationalVector,
        upper: RationalVector,
        resolution: usize,
        m: usize,
        color: impl Fn(&RationalVector) -> usize,
    ) -> Result<Self> {
        let count = (resolution + 1).pow(n as u32);
        let colors: Vec<usize> = (0..count)
            .map(|v| color(&position_of(&lower, &upper, resolution, &lattice_of(n, resolution, v))))
            .collect();
        let cover = WeightedCover::from_coloring(m, &colors)?;
        GridCover::new(n, lower, upper, resolution, cover)
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn resolution(&self) -> usize {
        self.resolution
    }

    pub fn lower(&self) -> &[Rational] {
        &self.lower
    }

    pub fn upper(&self) -> &[Rational] {
        &self.upper
    }

    pub fn cover(&self) -> &WeightedCover {
        &self.cover
    }

    pub fn tri(&self) -> &OrientedTriangulation {
        &self.tri
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_facets.len()
    }

    pub fn lattice_index(&self, v: usize) -> Vec<usize> {
        lattice_of(self.n, self.resolution, v)
    }

    pub fn vertex_id(&self, idx: &[usize]) -> usize {
        idx.iter().rev().fold(0, |acc, &i| acc * (self.resolution + 1) + i)
    }

    pub fn position(&self, v: usize) -> RationalVector {
        position_of(&self.lower, &self.upper, self.resolution, &self.lattice_index(v))
    }

    pub fn on_box_boundary(&self, v: usize) -> bool {
        self.lattice_index(v).iter().any(|&i| i == 0 || i == self.resolution)
    }

    /// Facets sharing a vertex with some facet of `facets`.
    fn star(&self, facets: &BTreeSet<usize>) -> BTreeSet<usize> {
        let mut out = BTreeSet::new();
        for &f in facets {
            for &u in &self.tri.facets()[f] {
                out.extend(self.vertex_facets[u].iter().copied());
            }
        }
        out
    }

    fn touches_box_boundary(&self, facets: &BTreeSet<usize>) -> bool {
        facets
            .iter()
            .any(|&f| self.tri.facets()[f].iter().any(|&u| self.on_box_boundary(u)))
    }

    /// Mirror image across the hyperplane `x_1 = x_2`. The Kuhn triangulation
    /// is symmetric under this swap, so every index changes sign.
    pub fn reflected(&self) -> GridCover {
        let swap = |v: &[Rational]| {
            let mut w = v.to_vec();
            w.swap(0, 1);
            w
        };
        let mut weights = BTreeMap::new();
        for v in 0..self.vertex_count() {
            let mut idx = self.lattice_index(v);
            idx.swap(0, 1);
            weights.insert(self.vertex_id(&idx), self.cover.weights(v).unwrap().clone());
        }
        let cover = WeightedCover::new(self.cover.m(), weights).expect("same weights");
        GridCover::new(self.n, swap(&self.lower), swap(&self.upper), self.resolution, cover)
            .expect("reflection of a valid grid")
    }
}

fn lattice_of(n: usize, resolution: usize, mut v: usize) -> Vec<usize> {
    (0..n)
        .map(|_| {
            let i = v % (resolution + 1);
            v /= resolution + 1;
            i
        })
        .collect()
}

fn position_of(lower: &[Rational], upper: &[Rational], resolution: usize, idx: &[usize]) -> RationalVector {
    let res = int(resolution as i64);
    idx.iter()
        .enumerate()
        .map(|(k, &i)| &lower[k] + (&upper[k] - &lower[k]) * int(i as i64) / &res)
        .collect()
}

fn kuhn_triangulation(n: usize, resolution: usize) -> OrientedTriangulation {
    let perms = permutations(n);
    let side = resolution + 1;
    let id = |x: &[usize]| x.iter().rev().fold(0, |acc, &i| acc * side + i);
    let mut facets = Vec::new();
    for cell in 0..resolution.pow(n as u32) {
        let base = lattice_of(n, resolution - 1, cell);
        for perm in &perms {
            let mut v = base.clone();
            let mut simplex = vec![id(&v)];
            for &axis in perm {
                v[axis] += 1;
                simplex.push(id(&v));
            }
            facets.push(simplex);
        }
    }
    let coords: Vec<RationalVector> = (0..side.pow(n as u32))
        .map(|v| lattice_of(n, resolution, v).iter().map(|&i| int(i as i64)).collect())
        .collect();
    OrientedTriangulation::oriented_by_coordinates(facets, &coords).expect("Kuhn simplices are full-dimensional")
}

/// Facets whose support union is balanced.
pub fn singular_facets(grid: &GridCover, config: &PointConfig) -> Result<Vec<usize>> {
    let profile = balanced::enumerate_minimal_balanced(config)?;
    singular_facets_with_profile(grid, config, &profile)
}

fn check_grid_config(grid: &GridCover, config: &PointConfig) -> Result<()> {
    if grid.n() != config.dim() {
        return Err(Error::input(format!(
            "grid lives in R^{} but the configuration in R^{}",
            grid.n(),
            config.dim()
        )));
    }
    if grid.cover().m() != config.len() {
        return Err(Error::input(format!(
            "grid weights have {} entries but the configuration has {} points",
            grid.cover().m(),
            config.len()
        )));
    }
    Ok(())
}

pub fn singular_facets_with_profile(
    grid: &GridCover,
    config: &PointConfig,
    profile: &BalancedProfile,
) -> Result<Vec<usize>> {
    check_grid_config(grid, config)?;
    let supports: Vec<u64> = (0..grid.vertex_count())
        .map(|u| grid.cover().support(u).map(|s| balanced::mask_of(&s)))
        .collect::<Result<_>>()?;
    Ok((0..grid.tri().len())
        .into_par_iter()
        .filter(|&f| {
            let mask = grid.tri().facets()[f].iter().fold(0, |m, &u| m | supports[u]);
            profile.contains_mask(mask)
        })
        .collect())
}

/// Singular facets whose image simplex does not actually contain `r`.
pub fn image_test_discrepancies(grid: &GridCover, config: &PointConfig, singular: &[usize]) -> Result<Vec<usize>> {
    let images: Vec<RationalVector> = (0..grid.vertex_count())
        .map(|u| grid.cover().image(u, config))
        .collect::<Result<_>>()?;
    let contains = singular
        .par_iter()
        .map(|&f| {
            let pts: Vec<RationalVector> = grid.tri().facets()[f].iter().map(|&u| images[u].clone()).collect();
            geometry::conv_membership(&pts, config.base()).map(|m| m.is_inside())
        })
        .collect::<Result<Vec<bool>>>()?;
    Ok(singular
        .iter()
        .zip(contains)
        .filter(|(_, inside)| !inside)
        .map(|(&f, _)| f)
        .collect())
}

#[derive(Clone, Debug)]
pub struct BalancedComponent {
    pub cells: Vec<usize>,
    /// Closed star of `cells`.
    pub neighborhood: Vec<usize>,
    pub neighborhood_boundary: OrientedTriangulation,
    pub index: Option<i64>,
}

fn find(parent: &mut [usize], x: usize) -> usize {
    let mut r = x;
    while parent[r] != r {
        r = parent[r];
    }
    let mut y = x;
    while parent[y] != r {
        let next = parent[y];
        parent[y] = r;
        y = next;
    }
    r
}

/// Groups singular facets and extracts each group's neighborhood boundary.
///
/// Two singular facets share a group when one lies within two star rings of
/// the other; this keeps neighborhoods, and their one-ring enlargements,
/// free of other groups' facets.
pub fn components(grid: &GridCover, singular: &[usize]) -> Result<Vec<BalancedComponent>> {
    let position: BTreeMap<usize, usize> = singular.iter().enumerate().map(|(i, &f)| (f, i)).collect();
    let mut parent: Vec<usize> = (0..singular.len()).collect();
    for (i, &f) in singular.iter().enumerate() {
        let reach = grid.star(&grid.star(&BTreeSet::from([f])));
        for g in reach {
            if let Some(&j) = position.get(&g) {
                let (a, b) = (find(&mut parent, i), find(&mut parent, j));
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
    }
    let mut groups: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
    for (i, &f) in singular.iter().enumerate() {
        let root = find(&mut parent, i);
        groups.entry(root).or_default().push(f);
    }
    let mut out = Vec::new();
    for cells in groups.into_values() {
        let set: BTreeSet<usize> = cells.iter().copied().collect();
        let hood = grid.star(&set);
        if grid.touches_box_boundary(&hood) {
            return Err(Error::BoundaryContact(format!(
                "component with facets {:?} reaches the edge of the grid",
                cells.iter().take(8).map(|f| f + 1).collect::<Vec<_>>()
            )));
        }
        let neighborhood: Vec<usize> = hood.into_iter().collect();
        let neighborhood_boundary = grid.tri().sub_triangulation(&neighborhood).boundary()?;
        out.push(BalancedComponent {
            cells,
            neighborhood,
            neighborhood_boundary,
            index: None,
        });
    }
    Ok(out)
}

fn boundary_degree(
    boundary: &OrientedTriangulation,
    grid: &GridCover,
    config: &PointConfig,
    profile: &BalancedProfile,
    seed: u64,
) -> Result<i64> {
    match degree::degree_of_cycle(boundary, grid.cover(), config, profile, seed)? {
        DegreeResult::Ok { degree, .. } => Ok(degree),
        DegreeResult::BalancedSimplexFound { facet, .. } => Err(Error::TheoremViolation(format!(
            "neighborhood boundary face {} has balanced support",
            facet + 1
        ))),
    }
}

pub fn local_index(comp: &BalancedComponent, grid: &GridCover, config: &PointConfig, seed: u64) -> Result<i64> {
    let profile = balanced::enumerate_minimal_balanced(config)?;
    local_index_with_profile(comp, grid, config, &profile, seed)
}

pub fn local_index_with_profile(
    comp: &BalancedComponent,
    grid: &GridCover,
    config: &PointConfig,
    profile: &BalancedProfile,
    seed: u64,
) -> Result<i64> {
    check_grid_config(grid, config)?;
    boundary_degree(&comp.neighborhood_boundary, grid, config, profile, seed)
}

/// Index over the neighborhood grown by one more star ring; `None` when the
/// grown region reaches the edge of the grid.
pub fn grown_local_index(
    comp: &BalancedComponent,
    grid: &GridCover,
    config: &PointConfig,
    profile: &BalancedProfile,
    seed: u64,
) -> Result<Option<i64>> {
    let grown = grid.star(&comp.neighborhood.iter().copied().collect());
    if grid.touches_box_boundary(&grown) {
        return Ok(None);
    }
    let ids: Vec<usize> = grown.into_iter().collect();
    let boundary = grid.tri().sub_triangulation(&ids).boundary()?;
    boundary_degree(&boundary, grid, config, profile, seed).map(Some)
}

#[derive(Clone, Debug)]
pub struct ComponentReport {
    pub component: BalancedComponent,
    pub index: i64,
    pub grown_index: Option<i64>,
}

impl ComponentReport {
    pub fn stable(&self) -> Option<bool> {
        self.grown_index.map(|g| g == self.index)
    }
}

#[derive(Clone, Debug)]
pub struct AdditivityReport {
    pub outer_degree: i64,
    pub components: Vec<ComponentReport>,
    pub index_sum: i64,
    /// Singular facets (support test) whose image misses `r`.
    pub image_discrepancies: Vec<usize>,
}

impl AdditivityReport {
    pub fn holds(&self) -> bool {
        self.outer_degree == self.index_sum
    }

    pub fn all_stable(&self) -> bool {
        self.components.iter().all(|c| c.stable() == Some(true))
    }

    pub fn to_json(&self) -> Value {
        json!({
            "outer_degree": self.outer_degree,
            "index_sum": self.index_sum,
            "additivity": self.holds(),
            "components": self.components.iter().enumerate().map(|(i, c)| json!({
                "component": i + 1,
                "cells": c.component.cells.iter().map(|f| f + 1).collect::<Vec<_>>(),
                "neighborhood_facets": c.component.neighborhood.len(),
                "boundary_facets": c.component.neighborhood_boundary.len(),
                "index": c.index,
                "grown_index": c.grown_index,
                "stable": c.stable(),
            })).collect::<Vec<_>>(),
            "image_test_discrepancies": self.image_discrepancies.iter().map(|f| f + 1).collect::<Vec<_>>(),
        })
    }
}

/// Outer boundary degree against the sum of local indices.
pub fn additivity_check(grid: &GridCover, config: &PointConfig, seed: u64) -> Result<AdditivityReport> {
    check_grid_config(grid, config)?;
    let profile = balanced::enumerate_minimal_balanced(config)?;
    let singular = singular_facets_with_profile(grid, config, &profile)?;
    let comps = components(grid, &singular)?;
    let outer = grid.tri().boundary()?;
    let outer_degree = match degree::degree_of_cycle(&outer, grid.cover(), config, &profile, seed)? {
        DegreeResult::Ok { degree, .. } => degree,
        DegreeResult::BalancedSimplexFound { facet, .. } => {
            return Err(Error::BoundaryContact(format!(
                "box boundary face {} has balanced support",
                facet + 1
            )))
        }
    };
    let components = comps
        .into_par_iter()
        .map(|mut component| {
            let index = local_index_with_profile(&component, grid, config, &profile, seed)?;
            let grown_index = grown_local_index(&component, grid, config, &profile, seed)?;
            component.index = Some(index);
            Ok(ComponentReport {
                component,
                index,
                grown_index,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    let index_sum = components.iter().map(|c| c.index).sum();
    let image_discrepancies = image_test_discrepancies(grid, config, &singular)?;
    Ok(AdditivityReport {
        outer_degree,
        components,
        index_sum,
        image_discrepancies,
    })
}

/// Point index maximizing `⟨direction, v_i − r⟩`, lowest index on ties.
pub fn steepest_color(config: &PointConfig, direction: &[Rational]) -> usize {
    let scores: Vec<Rational> = config
        .points()
        .iter()
        .map(|v| rational::dot(direction, &rational::sub(v, config.base())))
        .collect();
    let best = scores.iter().max().expect("nonempty configuration");
    scores.iter().position(|s| s == best).unwrap()
}

/// A vortex center with orientation `+1` or `-1`.
#[derive(Clone, Debug, Deserialize)]
pub struct Vortex {
    #[serde(with = "rational::serde_vector")]
    pub center: RationalVector,
    #[serde(default = "positive")]
    pub sign: i32,
}

fn positive() -> i32 {
    1
}

/// The direction field whose zeros are the vortex centers.
///
/// In the plane this is `Π (z − c_j)` with conjugated factors for negative
/// vortices; in space only one vortex is allowed, `p − c` with the last
/// coordinate flipped when negative.
pub fn vortex_field(vortices: &[Vortex], p: &[Rational]) -> RationalVector {
    if p.len() == 2 {
        let mut acc = (int(1), int(0));
        for v in vortices {
            let x = &p[0] - &v.center[0];
            let y = if v.sign < 0 {
                &v.center[1] - &p[1]
            } else {
                &p[1] - &v.center[1]
            };
            acc = (&acc.0 * &x - &acc.1 * &y, &acc.0 * &y + &acc.1 * &x);
        }
        vec![acc.0, acc.1]
    } else {
        let v = &vortices[0];
        let mut d = rational::sub(p, &v.center);
        if v.sign < 0 {
            let last = d.len() - 1;
            d[last] = -d[last].clone();
        }
        d
    }
}

pub fn vortex_grid(
    config: &PointConfig,
    lower: RationalVector,
    upper: RationalVector,
    resolution: usize,
    vortices: &[Vortex],
) -> Result<GridCover> {
    let n = config.dim();
    if vortices.is_empty() {
        return Err(Error::input("at least one vortex required"));
    }
    if n == 3 && vortices.len() > 1 {
        return Err(Error::input("only a single vortex is supported in R^3"));
    }
    if vortices.iter().any(|v| v.center.len() != n || v.sign.abs() != 1) {
        return Err(Error::input("vortex centers must match the dimension and signs be ±1"));
    }
    GridCover::from_coloring_fn(n, lower, upper, resolution, config.len(), |p| {
        steepest_color(config, &vortex_field(vortices, p))
    })
}

pub fn constant_grid(
    n: usize,
    m: usize,
    lower: RationalVector,
    upper: RationalVector,
    resolution: usize,
    color: usize,
) -> Result<GridCover> {
    GridCover::from_coloring_fn(n, lower, upper, resolution, m, |_| color)
}

fn random_center<R: Rng>(rng: &mut R, lo: usize, hi: usize) -> Rational {
    int(rng.gen_range(lo..=hi) as i64) + Rational::new(rng.gen_range(1..=6).into(), 7.into())
}

/// Planar grid on `[0, res]^2` with 1–3 random vortices and a few recolored
/// interior vertices, all at least a quarter of the box from the edge.
///
/// Draws are rejected (up to 64 times) when a component or its grown
/// neighborhood would reach the box boundary, which happens when the field
/// turns faster than the grid resolves near the edge.
pub fn random_planar_grid<R: Rng>(config: &PointConfig, max_resolution: usize, rng: &mut R) -> Result<GridCover> {
    if config.dim() != 2 {
        return Err(Error::input("planar grids need a planar configuration"));
    }
    if max_resolution < 16 {
        return Err(Error::input("random grids need resolution at least 16"));
    }
    for _ in 0..64 {
        let grid = draw_planar_grid(config, max_resolution, rng)?;
        match additivity_check(&grid, config, 0) {
            Ok(report) if report.components.iter().all(|c| c.grown_index.is_some()) => return Ok(grid),
            Ok(_) | Err(Error::BoundaryContact(_)) => continue,
            Err(e) => return Err(e),
        }
    }
    Err(Error::Capacity(
        "no random grid clear of the box boundary in 64 draws".into(),
    ))
}

fn draw_planar_grid<R: Rng>(config: &PointConfig, max_resolution: usize, rng: &mut R) -> Result<GridCover> {
    let res = rng.gen_range(16..=max_resolution);
    let margin = res / 4;
    let vortices: Vec<Vortex> = (0..rng.gen_range(1..=3))
        .map(|_| Vortex {
            center: vec![
                random_center(rng, margin, res - margin - 1),
                random_center(rng, margin, res - margin - 1),
            ],
            sign: if rng.gen_bool(0.5) { 1 } else { -1 },
        })
        .collect();
    let grid = vortex_grid(
        config,
        vec![int(0), int(0)],
        vec![int(res as i64), int(res as i64)],
        res,
        &vortices,
    )?;
    let mut weights: BTreeMap<usize, RationalVector> = (0..grid.vertex_count())
        .map(|v| (v, grid.cover().weights(v).unwrap().clone()))
        .collect();
    for _ in 0..rng.gen_range(0..=3) {
        let v = grid.vertex_id(&[
            rng.gen_range(margin..=res - margin),
            rng.gen_range(margin..=res - margin),
        ]);
        let mut w = vec![Rational::zero(); config.len()];
        w[rng.gen_range(0..config.len())] = int(1);
        weights.insert(v, w);
    }
    GridCover::new(
        2,
        grid.lower,
        grid.upper,
        res,
        WeightedCover::new(config.len(), weights)?,
    )
}

/// JSON description of a grid: explicit per-vertex data or a named builder.
#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridSpec {
    pub n: usize,
    #[serde(with = "rational::serde_vector")]
    pub lower: RationalVector,
    #[serde(with = "rational::serde_vector")]
    pub upper: RationalVector,
    pub resolution: usize,
    #[serde(default)]
    pub builder: Option<String>,
    #[serde(default)]
    pub coloring: Option<Vec<usize>>,
    #[serde(default)]
    pub weights: Option<Value>,
    #[serde(default)]
    pub color: Option<usize>,
    #[serde(default)]
    pub center: Option<Point>,
    #[serde(default)]
    pub sign: Option<i32>,
    #[serde(default)]
    pub centers: Option<Vec<Point>>,
    #[serde(default)]
    pub vortices: Option<Vec<Vortex>>,
}

impl GridSpec {
    pub fn build(self, config: &PointConfig) -> Result<GridCover> {
        let m = config.len();
        let (lower, upper, res) = (self.lower, self.upper, self.resolution);
        match self.builder.as_deref() {
            None => {
                let spec = match (self.coloring, self.weights) {
                    (Some(coloring), None) => CoverSpec::Coloring { coloring },
                    (None, Some(w)) => serde_json::from_value(json!({ "weights": w }))?,
                    _ => return Err(Error::input("grid needs exactly one of coloring, weights or builder")),
                };
                GridCover::new(self.n, lower, upper, res, spec.into_cover(m)?)
            }
            Some("constant") => {
                let c = self.color.ok_or_else(|| Error::input("constant builder needs color"))?;
                if c == 0 || c > m {
                    return Err(Error::input(format!("color {c} out of range 1..={m}")));
                }
                constant_grid(self.n, m, lower, upper, res, c - 1)
            }
            Some("vortex") => {
                let center = self
                    .center
                    .ok_or_else(|| Error::input("vortex builder needs center"))?
                    .0;
                let sign = self.sign.unwrap_or(1);
                vortex_grid(config, lower, upper, res, &[Vortex { center, sign }])
            }
            Some("bivortex") => {
                let centers = self
                    .centers
                    .ok_or_else(|| Error::input("bivortex builder needs centers"))?;
                if centers.len() != 2 {
                    return Err(Error::input("bivortex builder needs two centers"));
                }
                let vortices: Vec<Vortex> = centers
                    .into_iter()
                    .zip([1, -1])
                    .map(|(c, sign)| Vortex { center: c.0, sign })
                    .collect();
                vortex_grid(config, lower, upper, res, &vortices)
            }
            Some("vortices") => {
                let vortices = self
                    .vortices
                    .ok_or_else(|| Error::input("vortices builder needs vortices"))?;
                vortex_grid(config, lower, upper, res, &vortices)
            }
            Some(other) => Err(Error::input(format!(
                "unknown builder {other:?} (expected constant, vortex, bivortex, vortices)"
            ))),
        }
        .and_then(|g| {
            if g.n() != self.n {
                Err(Error::input("grid dimension does not match the configuration"))
            } else {
                Ok(g)
            }
        })
    }
}

#[derive(Deserialize)]
#[serde(transparent)]
pub struct Point(#[serde(with = "rational::serde_vector")] pub RationalVector);

const PALETTE: [&str; 8] = [
    "#d62728", "#1f77b4", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b", "#e377c2", "#17becf",
];

/// Static picture of a planar grid: singular facets by component, their
/// neighborhoods shaded.
pub fn render_svg(grid: &GridCover, comps: &[BalancedComponent]) -> Result<String> {
    if grid.n() != 2 {
        return Err(Error::input("SVG output is only available for planar grids"));
    }
    let size = 600.0;
    let to_f = |x: &Rational| x.to_f64().unwrap_or(0.0);
    let (x0, y0) = (to_f(&grid.lower[0]), to_f(&grid.lower[1]));
    let (w, h) = (to_f(&grid.upper[0]) - x0, to_f(&grid.upper[1]) - y0);
    let px = |v: usize| {
        let p = grid.position(v);
        ((to_f(&p[0]) - x0) / w * size, size - (to_f(&p[1]) - y0) / h * size)
    };
    let mut fill = vec!["#ffffff"; grid.tri().len()];
    for (k, c) in comps.iter().enumerate() {
        for &f in &c.neighborhood {
            fill[f] = "#e8e8e8";
        }
        for &f in &c.cells {
            fill[f] = PALETTE[k % PALETTE.len()];
        }
    }
    let mut svg = String::new();
    writeln!(
        svg,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size}" height="{size}" viewBox="0 0 {size} {size}">"#
    )
    .unwrap();
    for (f, facet) in grid.tri().facets().iter().enumerate() {
        let pts: Vec<String> = facet
            .iter()
            .map(|&u| {
                let (a, b) = px(u);
                format!("{a:.2},{b:.2}")
            })
            .collect();
        writeln!(
            svg,
            r##"<polygon points="{}" fill="{}" stroke="#bbbbbb" stroke-width="0.5"/>"##,
            pts.join(" "),
            fill[f]
        )
        .unwrap();
    }
    svg.push_str("</svg>\n");
    Ok(svg)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::ratio;

    fn triangle() -> PointConfig {
        PointConfig::from_ints(&[&[1, 0], &[-1, 1], &[-1, -1]], &[0, 0]).unwrap()
    }

    fn square() -> PointConfig {
        PointConfig::from_ints(&[&[1, 0], &[0, 1], &[-1, 0], &[0, -1]], &[0, 0]).unwrap()
    }

    fn box2(res: i64) -> (RationalVector, RationalVector) {
        (vec![int(0), int(0)], vec![int(res), int(res)])
    }

    fn center(x: i64, y: i64) -> RationalVector {
        vec![int(x) + ratio(3, 7), int(y) + ratio(2, 7)]
    }

    #[test]
    fn kuhn_structure() {
        let t = kuhn_triangulation(2, 3);
        assert_eq!(t.len(), 18);
        let b = t.boundary().unwrap();
        assert_eq!(b.len(), 12);
        assert!(b.is_coherent_closed());
        let t3 = kuhn_triangulation(3, 2);
        assert_eq!(t3.len(), 48);
        assert!(t3.boundary().unwrap().is_coherent_closed());
    }

    #[test]
    fn constant_field_is_quiet() {
        let (lo, hi) = box2(6);
        let g = constant_grid(2, 3, lo, hi, 6, 0).unwrap();
        assert!(singular_facets(&g, &triangle()).unwrap().is_empty());
        let rep = additivity_check(&g, &triangle(), 0).unwrap();
        assert_eq!(rep.outer_degree, 0);
        assert!(rep.components.is_empty());
        assert!(rep.holds());
    }

    #[test]
    fn single_vortex() {
        let (lo, hi) = box2(10);
        let cfg = triangle();
        let g = vortex_grid(
            &cfg,
            lo,
            hi,
            10,
            &[Vortex {
                center: center(5, 5),
                sign: 1,
            }],
        )
        .unwrap();
        let sing = singular_facets(&g, &cfg).unwrap();
        assert!(!sing.is_empty());
        let comps = components(&g, &sing).unwrap();
        assert_eq!(comps.len(), 1);
        assert_eq!(local_index(&comps[0], &g, &cfg, 1).unwrap(), 1);
        let rep = additivity_check(&g, &cfg, 4).unwrap();
        assert_eq!(rep.outer_degree, 1);
        assert!(rep.holds() && rep.all_stable());

        let (lo, hi) = box2(10);
        let g = vortex_grid(
            &cfg,
            lo,
            hi,
            10,
            &[Vortex {
                center: center(5, 5),
                sign: -1,
            }],
        )
        .unwrap();
        let rep = additivity_check(&g, &cfg, 4).unwrap();
        assert_eq!(rep.outer_degree, -1);
        assert_eq!(rep.components[0].index, -1);
    }

    #[test]
    fn vortex_pair_cancels() {
        let (lo, hi) = box2(24);
        let cfg = square();
        let vs = [
            Vortex {
                center: center(6, 6),
                sign: 1,
            },
            Vortex {
                center: center(17, 17),
                sign: -1,
            },
        ];
        let g = vortex_grid(&cfg, lo, hi, 24, &vs).unwrap();
        let rep = additivity_check(&g, &cfg, 2).unwrap();
        assert_eq!(rep.components.len(), 2);
        let mut idx: Vec<i64> = rep.components.iter().map(|c| c.index).collect();
        idx.sort();
        assert_eq!(idx, vec![-1, 1]);
        assert_eq!(rep.outer_degree, 0);
        assert!(rep.holds() && rep.all_stable());
        let mut cells: BTreeSet<usize> = BTreeSet::new();
        for c in &rep.components {
            for f in &c.component.neighborhood {
                assert!(cells.insert(*f));
            }
        }
    }

    #[test]
    fn removable_cluster() {
        let cfg = square();
        let (lo, hi) = box2(8);
        let mut g = constant_grid(2, 4, lo, hi, 8, 0).unwrap();
        let mut weights: BTreeMap<usize, RationalVector> = (0..g.vertex_count())
            .map(|v| (v, g.cover().weights(v).unwrap().clone()))
            .collect();
        let mid = g.vertex_id(&[4, 4]);
        weights.insert(mid, vec![int(0), int(0), int(1), int(0)]);
        g = GridCover::new(
            2,
            g.lower.clone(),
            g.upper.clone(),
            8,
            WeightedCover::new(4, weights).unwrap(),
        )
        .unwrap();
        let rep = additivity_check(&g, &cfg, 0).unwrap();
        assert_eq!(rep.components.len(), 1);
        assert_eq!(rep.components[0].index, 0);
        assert_eq!(rep.outer_degree, 0);
        // every singular edge image is the segment v_1 v_3, which passes through r
        assert!(rep.image_discrepancies.is_empty());
    }

    #[test]
    fn reflection_negates() {
        let (lo, hi) = box2(12);
        let cfg = triangle();
        let g = vortex_grid(
            &cfg,
            lo,
            hi,
            12,
            &[Vortex {
                center: center(5, 6),
                sign: 1,
            }],
        )
        .unwrap();
        let a = additivity_check(&g, &cfg, 0).unwrap();
        let b = additivity_check(&g.reflected(), &cfg, 0).unwrap();
        assert_eq!(a.outer_degree, -b.outer_degree);
        assert_eq!(a.components[0].index, -b.components[0].index);
    }

    #[test]
    fn boundary_contact() {
        let (lo, hi) = box2(8);
        let cfg = triangle();
        let g = vortex_grid(
            &cfg,
            lo,
            hi,
            8,
            &[Vortex {
                center: center(0, 4),
                sign: 1,
            }],
        )
        .unwrap();
        assert!(matches!(additivity_check(&g, &cfg, 0), Err(Error::BoundaryContact(_))));
    }

    #[test]
    fn space_vortex() {
        let cfg = PointConfig::from_ints(&[&[1, 0, 0], &[0, 1, 0], &[0, 0, 1], &[-1, -1, -1]], &[0, 0, 0]).unwrap();
        let lo = vec![int(0); 3];
        let hi = vec![int(8); 3];
        let c = vec![int(4) + ratio(1, 7), int(3) + ratio(3, 7), int(4) + ratio(2, 7)];
        for sign in [1, -1] {
            let g = vortex_grid(
                &cfg,
                lo.clone(),
                hi.clone(),
                8,
                &[Vortex {
                    center: c.clone(),
                    sign,
                }],
            )
            .unwrap();
            let rep = additivity_check(&g, &cfg, 5).unwrap();
            assert_eq!(rep.outer_degree, sign as i64);
            assert!(rep.holds());
        }
    }

    #[test]
    fn grid_spec_builders() {
        let cfg = triangle();
        let spec: GridSpec = serde_json::from_str(
            r#"{"n":2,"lower":[0,0],"upper":[10,10],"resolution":10,"builder":"vortex","center":["38/7","37/7"]}"#,
        )
        .unwrap();
        let g = spec.build(&cfg).unwrap();
        assert_eq!(additivity_check(&g, &cfg, 0).unwrap().outer_degree, 1);
        let spec: GridSpec = serde_json::from_str(
            r#"{"n":2,"lower":[0,0],"upper":[2,2],"resolution":2,"builder":"constant","color":2}"#,
        )
        .unwrap();
        assert_eq!(spec.build(&cfg).unwrap().cover().color(4), Some(1));
        let spec: GridSpec =
            serde_json::from_str(r#"{"n":2,"lower":[0,0],"upper":[1,1],"resolution":1,"coloring":[1,2,3,1]}"#).unwrap();
        assert!(spec.build(&cfg).is_ok());
        let spec: GridSpec =
            serde_json::from_str(r#"{"n":2,"lower":[0,0],"upper":[1,1],"resolution":1,"coloring":[1,2,3]}"#).unwrap();
        assert!(matches!(spec.build(&cfg), Err(Error::Input(_))));
    }

    #[test]
    fn svg_output() {
        let (lo, hi) = box2(4);
        let g = constant_grid(2, 3, lo, hi, 4, 0).unwrap();
        let svg = render_svg(&g, &[]).unwrap();
        assert_eq!(svg.matches("<polygon").count(), 32);
    }
}
