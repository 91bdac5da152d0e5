//! Balanced subsets of a point configuration `(V, r)`, the complex of
//! non-balanced subsets and BS-equivalence.
//!
//! Index sets are sorted `Vec<usize>` of 0-based point indices. Internally
//! subsets travel as `u64` bitmasks, which caps configurations at 64 points;
//! the configurable [`Limits`] keep us well below that.

use std::collections::{BTreeMap, BTreeSet};

use num_traits::Signed;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{self, ConvexMembership};
use crate::rational::{self, Rational, RationalVector};

pub type IndexSet = Vec<usize>;

/// A point set `V = (v_1..v_m)` in `R^d` together with the base point `r`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawConfig", into = "RawConfig")]
pub struct PointConfig {
    dim: usize,
    points: Vec<RationalVector>,
    base: RationalVector,
}

#[derive(Serialize, Deserialize)]
struct RawConfig {
    dim: usize,
    #[serde(with = "rational::serde_vectors")]
    points: Vec<RationalVector>,
    #[serde(with = "rational::serde_vector")]
    r: RationalVector,
}

impl TryFrom<RawConfig> for PointConfig {
    type Error = Error;

    fn try_from(raw: RawConfig) -> Result<Self> {
        PointConfig::new(raw.dim, raw.points, raw.r)
    }
}

impl From<PointConfig> for RawConfig {
    fn from(c: PointConfig) -> Self {
        RawConfig {
            dim: c.dim,
            points: c.points,
            r: c.base,
        }
    }
}

impl PointConfig {
    pub fn new(dim: usize, points: Vec<RationalVector>, base: RationalVector) -> Result<Self> {
        if dim == 0 {
            return Err(Error::input("dimension must be at least 1"));
        }
        if points.is_empty() {
            return Err(Error::input("configuration needs at least one point"));
        }
        if base.len() != dim {
            return Err(Error::input(format!(
                "base point has dimension {}, expected {dim}",
                base.len()
            )));
        }
        if let Some(i) = points.iter().position(|p| p.len() != dim) {
            return Err(Error::input(format!(
                "point {} has dimension {}, expected {dim}",
                i + 1,
                points[i].len()
            )));
        }
        Ok(PointConfig { dim, points, base })
    }

    /// Convenience constructor from integer coordinates.
    pub fn from_ints(points: &[&[i64]], base: &[i64]) -> Result<Self> {
        PointConfig::new(
            base.len(),
            points.iter().map(|p| rational::ivec(p)).collect(),
            rational::ivec(base),
        )
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[RationalVector] {
        &self.points
    }

    pub fn base(&self) -> &[Rational] {
        &self.base
    }

    pub fn subset_points(&self, subset: &[usize]) -> Vec<RationalVector> {
        subset.iter().map(|&i| self.points[i].clone()).collect()
    }

    pub fn membership(&self, subset: &[usize]) -> Result<ConvexMembership> {
        geometry::conv_membership(&self.subset_points(subset), &self.base)
    }

    pub fn rank(&self) -> usize {
        geometry::affine_rank(&self.points).expect("validated configuration")
    }

    pub fn base_in_relint(&self) -> bool {
        geometry::relint_membership(&self.points, &self.base).expect("validated configuration")
    }
}

/// Size limits for the exponential enumerations.
#[derive(Clone, Copy, Debug)]
pub struct Limits {
    pub max_points: usize,
    pub max_dim: usize,
}

impl Default for Limits {
    fn default() -> Self {
        Limits {
            max_points: 20,
            max_dim: 6,
        }
    }
}

impl Limits {
    fn check(&self, config: &PointConfig) -> Result<()> {
        if config.len() > self.max_points.min(63) {
            return Err(Error::Capacity(format!(
                "{} points exceeds the cap of {}",
                config.len(),
                self.max_points
            )));
        }
        if config.dim() > self.max_dim {
            return Err(Error::Capacity(format!(
                "dimension {} exceeds the cap of {}",
                config.dim(),
                self.max_dim
            )));
        }
        Ok(())
    }
}

pub(crate) fn mask_of(set: &[usize]) -> u64 {
    set.iter().fold(0, |acc, &i| acc | (1u64 << i))
}

pub(crate) fn set_of(mask: u64) -> IndexSet {
    (0..64).filter(|i| mask >> i & 1 == 1).collect()
}

/// All `k`-subsets of `[m]` as masks, in increasing numeric order.
pub(crate) fn k_subsets(m: usize, k: usize) -> Vec<u64> {
    if k > m {
        return Vec::new();
    }
    if k == 0 {
        return vec![0];
    }
    let limit = 1u64 << m;
    let mut out = Vec::new();
    let mut s: u64 = (1u64 << k) - 1;
    while s < limit {
        out.push(s);
        // Gosper's hack
        let c = s & s.wrapping_neg();
        let r = s + c;
        s = (((r ^ s) >> 2) / c) | r;
    }
    out
}

/// The inclusion-minimal `r`-balanced subsets of a configuration.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BalancedProfile {
    m: usize,
    minimal: Vec<IndexSet>,
}

impl BalancedProfile {
    /// Builds a profile from an explicit family, reducing it to its minimal members.
    pub fn from_family(m: usize, family: Vec<IndexSet>) -> Result<Self> {
        let mut masks: Vec<u64> = Vec::with_capacity(family.len());
        for s in &family {
            if let Some(&i) = s.iter().find(|&&i| i >= m) {
                return Err(Error::input(format!("index {} out of range 1..={m}", i + 1)));
            }
            masks.push(mask_of(s));
        }
        Ok(BalancedProfile {
            m,
            minimal: minimal_sets(masks).into_iter().map(set_of).collect(),
        })
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn minimal_balanced(&self) -> &[IndexSet] {
        &self.minimal
    }

    pub(crate) fn masks(&self) -> Vec<u64> {
        self.minimal.iter().map(|s| mask_of(s)).collect()
    }

    pub(crate) fn contains_mask(&self, mask: u64) -> bool {
        self.minimal.iter().any(|s| {
            let sm = mask_of(s);
            sm & mask == sm
        })
    }

    /// True iff `subset` contains a minimal balanced set.
    pub fn is_balanced(&self, subset: &[usize]) -> Result<bool> {
        if let Some(&i) = subset.iter().find(|&&i| i >= self.m) {
            return Err(Error::input(format!("index {} out of range 1..={}", i + 1, self.m)));
        }
        Ok(self.contains_mask(mask_of(subset)))
    }

    /// Smallest (then lexicographically first) minimal balanced set inside `subset`.
    pub fn balanced_core_of(&self, subset: &[usize]) -> Option<IndexSet> {
        let mask = mask_of(subset);
        self.minimal
            .iter()
            .filter(|s| {
                let sm = mask_of(s);
                sm & mask == sm
            })
            .min_by(|a, b| a.len().cmp(&b.len()).then_with(|| a.cmp(b)))
            .cloned()
    }
}

/// Keeps the inclusion-minimal masks, sorted by their index lists.
pub(crate) fn minimal_sets(mut masks: Vec<u64>) -> Vec<u64> {
    masks.sort_by_key(|m| (m.count_ones(), *m));
    masks.dedup();
    let mut kept: Vec<u64> = Vec::new();
    for m in masks {
        if !kept.iter().any(|&k| k & !m == 0) {
            kept.push(m);
        }
    }
    kept.sort_by_key(|&m| set_of(m));
    kept
}

pub fn enumerate_minimal_balanced(config: &PointConfig) -> Result<BalancedProfile> {
    enumerate_minimal_balanced_with(config, Limits::default())
}

/// Level-by-level search over subsets of size at most `d + 1`.
///
/// A `k`-subset is tested only if it contains no balanced set found at a
/// smaller level, so every hit is automatically inclusion-minimal.
pub fn enumerate_minimal_balanced_with(config: &PointConfig, limits: Limits) -> Result<BalancedProfile> {
    limits.check(config)?;
    let m = config.len();
    let mut found: Vec<u64> = Vec::new();
    for k in 1..=(config.dim() + 1).min(m) {
        let candidates: Vec<u64> = k_subsets(m, k)
            .into_iter()
            .filter(|&s| !found.iter().any(|&f| f & !s == 0))
            .collect();
        let hits: Vec<u64> = candidates
            .par_iter()
            .map(|&s| config.membership(&set_of(s)).map(|r| (s, r.is_inside())))
            .collect::<Result<Vec<_>>>()?
            .into_iter()
            .filter_map(|(s, inside)| inside.then_some(s))
            .collect();
        found.extend(hits);
    }
    Ok(BalancedProfile {
        m,
        minimal: minimal_sets(found).into_iter().map(set_of).collect(),
    })
}

/// A simplicial complex given by its facets (the maximal faces).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SimplicialComplex {
    vertex_count: usize,
    facets: Vec<IndexSet>,
}

impl SimplicialComplex {
    /// Builds the complex generated by `faces`, keeping only the maximal ones.
    pub fn from_faces(vertex_count: usize, faces: Vec<IndexSet>) -> Result<Self> {
        let mut masks = Vec::with_capacity(faces.len());
        for f in &faces {
            if let Some(&i) = f.iter().find(|&&i| i >= vertex_count) {
                return Err(Error::input(format!(
                    "vertex {} out of range 1..={vertex_count}",
                    i + 1
                )));
            }
            if vertex_count > 63 {
                return Err(Error::Capacity("complexes are limited to 63 vertices".into()));
            }
            masks.push(mask_of(f));
        }
        masks.sort_by_key(|m| std::cmp::Reverse(m.count_ones()));
        masks.dedup();
        let mut kept: Vec<u64> = Vec::new();
        for m in masks {
            if !kept.iter().any(|&k| k & m == m) {
                kept.push(m);
            }
        }
        let mut facets: Vec<IndexSet> = kept.into_iter().map(set_of).collect();
        facets.sort();
        Ok(SimplicialComplex { vertex_count, facets })
    }

    /// The full simplex on `n` vertices.
    pub fn simplex(n: usize) -> Self {
        SimplicialComplex {
            vertex_count: n,
            facets: vec![(0..n).collect()],
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn facets(&self) -> &[IndexSet] {
        &self.facets
    }

    pub fn dimension(&self) -> isize {
        self.facets.iter().map(|f| f.len() as isize - 1).max().unwrap_or(-1)
    }

    pub fn contains_face(&self, face: &[usize]) -> bool {
        let m = mask_of(face);
        self.facets.iter().any(|f| mask_of(f) & m == m)
    }

    /// Relabels vertex `i` as `perm[i]`.
    pub fn relabel(&self, perm: &[usize]) -> Self {
        let faces = self
            .facets
            .iter()
            .map(|f| {
                let mut g: IndexSet = f.iter().map(|&i| perm[i]).collect();
                g.sort();
                g
            })
            .collect();
        SimplicialComplex::from_faces(self.vertex_count, faces).expect("permutation of valid complex")
    }
}

/// Minimal hitting sets of a hypergraph (Berge's incremental algorithm).
pub(crate) fn minimal_transversals(edges: &[u64]) -> Vec<u64> {
    let mut trs: Vec<u64> = vec![0];
    for &e in edges {
        let mut next: Vec<u64> = Vec::new();
        for &t in &trs {
            if t & e != 0 {
                next.push(t);
            } else {
                let mut bits = e;
                while bits != 0 {
                    let b = bits & bits.wrapping_neg();
                    next.push(t | b);
                    bits ^= b;
                }
            }
        }
        trs = minimal_sets(next);
    }
    trs
}

pub fn nonbalanced_complex(config: &PointConfig) -> Result<SimplicialComplex> {
    let profile = enumerate_minimal_balanced(config)?;
    Ok(nonbalanced_complex_from_profile(&profile))
}

/// Facets are complements of the minimal transversals of the minimal balanced family.
pub fn nonbalanced_complex_from_profile(profile: &BalancedProfile) -> SimplicialComplex {
    let m = profile.m();
    let full: u64 = if m == 64 { u64::MAX } else { (1u64 << m) - 1 };
    let mut facets: Vec<IndexSet> = minimal_transversals(&profile.masks())
        .into_iter()
        .map(|t| set_of(full & !t))
        .collect();
    facets.sort();
    SimplicialComplex {
        vertex_count: m,
        facets,
    }
}

/// Index-aligned BS-equivalence.
pub fn bs_equivalent(a: &PointConfig, b: &PointConfig) -> Result<bool> {
    if a.len() != b.len() {
        return Err(Error::Mismatch(format!(
            "configurations have {} and {} points",
            a.len(),
            b.len()
        )));
    }
    Ok(enumerate_minimal_balanced(a)? == enumerate_minimal_balanced(b)?)
}

/// BS-equivalence after some relabeling of the points; returns the relabeling `a[i] ↦ b[perm[i]]`.
pub fn bs_equivalent_up_to_permutation(a: &PointConfig, b: &PointConfig) -> Result<Option<Vec<usize>>> {
    if a.len() != b.len() {
        return Err(Error::Mismatch(format!(
            "configurations have {} and {} points",
            a.len(),
            b.len()
        )));
    }
    let pa = enumerate_minimal_balanced(a)?;
    let pb = enumerate_minimal_balanced(b)?;
    Ok(hypergraph_isomorphism(a.len(), &pa.masks(), &pb.masks()))
}

/// Per-vertex invariant: sorted sizes of the edges through it.
fn vertex_signatures(m: usize, edges: &[u64]) -> Vec<Vec<u32>> {
    (0..m)
        .map(|v| {
            let mut sig: Vec<u32> = edges
                .iter()
                .filter(|&&e| e >> v & 1 == 1)
                .map(|e| e.count_ones())
                .collect();
            sig.sort();
            sig
        })
        .collect()
}

/// Canonical digest of a hypergraph up to vertex relabeling (an invariant, not a certificate).
pub fn hypergraph_invariant(m: usize, edges: &[u64]) -> Vec<(Vec<u32>, usize)> {
    let mut counts: BTreeMap<Vec<u32>, usize> = BTreeMap::new();
    for s in vertex_signatures(m, edges) {
        *counts.entry(s).or_default() += 1;
    }
    counts.into_iter().collect()
}

pub(crate) fn hypergraph_isomorphism(m: usize, ea: &[u64], eb: &[u64]) -> Option<Vec<usize>> {
    if ea.len() != eb.len() || hypergraph_invariant(m, ea) != hypergraph_invariant(m, eb) {
        return None;
    }
    let sa = vertex_signatures(m, ea);
    let sb = vertex_signatures(m, eb);
    let target: BTreeSet<u64> = eb.iter().copied().collect();
    let mut perm = vec![usize::MAX; m];
    let mut used = vec![false; m];

    fn consistent(perm: &[usize], ea: &[u64], target: &BTreeSet<u64>, assigned: u64) -> bool {
        ea.iter().filter(|&&e| e & assigned == e).all(|&e| {
            let img = set_of(e).into_iter().fold(0u64, |acc, v| acc | 1 << perm[v]);
            target.contains(&img)
        })
    }

    #[allow(clippy::too_many_arguments)]
    fn go(
        v: usize,
        m: usize,
        perm: &mut Vec<usize>,
        used: &mut Vec<bool>,
        sa: &[Vec<u32>],
        sb: &[Vec<u32>],
        ea: &[u64],
        target: &BTreeSet<u64>,
    ) -> bool {
        if v == m {
            return true;
        }
        for w in 0..m {
            if used[w] || sa[v] != sb[w] {
                continue;
            }
            perm[v] = w;
            used[w] = true;
            let assigned = if v + 1 == 64 { u64::MAX } else { (1u64 << (v + 1)) - 1 };
            if consistent(perm, ea, target, assigned) && go(v + 1, m, perm, used, sa, sb, ea, target) {
                return true;
            }
            used[w] = false;
        }
        perm[v] = usize::MAX;
        false
    }

    go(0, m, &mut perm, &mut used, &sa, &sb, ea, &target).then_some(perm)
}

/// Moves each point along its ray from `r`: `v_i' = λ_i (v_i − r) + r`.
pub fn scale_transform(config: &PointConfig, lambdas: &[Rational]) -> Result<PointConfig> {
    if lambdas.len() != config.len() {
        return Err(Error::input(format!(
            "expected {} scale factors, got {}",
            config.len(),
            lambdas.len()
        )));
    }
    if let Some(i) = lambdas.iter().position(|l| !l.is_positive()) {
        return Err(Error::input(format!("scale factor {} must be positive", i + 1)));
    }
    let r = config.base();
    let points = config
        .points()
        .iter()
        .zip(lambdas)
        .map(|(v, l)| rational::add(&rational::scale(&rational::sub(v, r), l), r))
        .collect();
    PointConfig::new(config.dim(), points, r.to_vec())
}

pub fn to_one_based(sets: &[IndexSet]) -> Vec<Vec<usize>> {
    sets.iter().map(|s| s.iter().map(|i| i + 1).collect()).collect()
}
