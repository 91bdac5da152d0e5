//! Chain complexes of facet-list complexes, Smith normal form over the
//! integers, reduced homology and oriented triangulations.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::balanced::{mask_of, set_of, IndexSet, SimplicialComplex};
use crate::error::{Error, Result};
use crate::rational::{self, RationalVector};

/// Most faces a complex may have before homology refuses to run.
pub const MAX_FACES: usize = 1 << 20;

/// Dense integer matrix, row-major.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix {
            rows,
            cols,
            data: vec![BigInt::zero(); rows * cols],
        }
    }

    pub fn from_rows(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = IntMatrix::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged matrix");
            for (j, &x) in r.iter().enumerate() {
                m.data[i * cols + j] = BigInt::from(x);
            }
        }
        m
    }

    pub fn identity(n: usize) -> Self {
        let mut m = IntMatrix::zeros(n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, other: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, other.rows);
        let mut out = IntMatrix::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = other.get(k, j);
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        out
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(Zero::is_zero)
    }

    fn to_sparse(&self) -> SparseColumns {
        let mut s = SparseColumns::new(self.rows, self.cols);
        for j in 0..self.cols {
            for i in 0..self.rows {
                let v = self.get(i, j);
                if !v.is_zero() {
                    s.insert(i, j, v.clone());
                }
            }
        }
        s
    }
}

/// Column-sparse integer matrix used for elimination.
struct SparseColumns {
    rows: usize,
    cols: Vec<BTreeMap<usize, BigInt>>,
    row_cols: Vec<BTreeSet<usize>>,
}

impl SparseColumns {
    fn new(rows: usize, cols: usize) -> Self {
        SparseColumns {
            rows,
            cols: vec![BTreeMap::new(); cols],
            row_cols: vec![BTreeSet::new(); rows],
        }
    }

    fn insert(&mut self, i: usize, j: usize, v: BigInt) {
        self.cols[j].insert(i, v);
        self.row_cols[i].insert(j);
    }

    /// Eliminates every unit pivot it can find; returns how many were removed.
    fn eliminate_units(&mut self) -> usize {
        let mut eliminated = 0;
        loop {
            let mut progress = false;
            for j in 0..self.cols.len() {
                let pivot = self.cols[j]
                    .iter()
                    .filter(|(_, v)| v.abs().is_one())
                    .min_by_key(|(&i, _)| self.row_cols[i].len())
                    .map(|(&i, v)| (i, v.clone()));
                let Some((i, unit)) = pivot else { continue };
                let others: Vec<usize> = self.row_cols[i].iter().copied().filter(|&k| k != j).collect();
                let pivot_col = self.cols[j].clone();
                for k in others {
                    let factor = &self.cols[k][&i] * &unit;
                    for (&r, v) in &pivot_col {
                        let entry = self.cols[k].entry(r).or_insert_with(BigInt::zero);
                        *entry -= &factor * v;
                        if entry.is_zero() {
                            self.cols[k].remove(&r);
                            self.row_cols[r].remove(&k);
                        } else {
                            self.row_cols[r].insert(k);
                        }
                    }
                }
                for &r in pivot_col.keys() {
                    self.row_cols[r].remove(&j);
                }
                self.cols[j].clear();
                eliminated += 1;
                progress = true;
            }
            if !progress {
                return eliminated;
            }
        }
    }

    fn remainder_dense(&self) -> Vec<Vec<BigInt>> {
        let live_cols: Vec<usize> = (0..self.cols.len()).filter(|&j| !self.cols[j].is_empty()).collect();
        let live_rows: Vec<usize> = (0..self.rows).filter(|&i| !self.row_cols[i].is_empty()).collect();
        let row_pos: HashMap<usize, usize> = live_rows.iter().enumerate().map(|(p, &i)| (i, p)).collect();
        let mut dense = vec![vec![BigInt::zero(); live_cols.len()]; live_rows.len()];
        for (c, &j) in live_cols.iter().enumerate() {
            for (i, v) in &self.cols[j] {
                dense[row_pos[i]][c] = v.clone();
            }
        }
        dense
    }

    /// Nonzero invariant factors in divisibility order.
    fn invariant_factors(mut self) -> Vec<BigInt> {
        let units = self.eliminate_units();
        let mut factors = vec![BigInt::one(); units];
        factors.extend(dense_smith_diagonal(self.remainder_dense()));
        factors
    }
}

/// Nonzero diagonal of the Smith form of a dense matrix, pivoting on the
/// smallest nonzero magnitude.
fn dense_smith_diagonal(mut a: Vec<Vec<BigInt>>) -> Vec<BigInt> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut diag = Vec::new();
    let mut t = 0;
    while t < rows.min(cols) {
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !a[i][j].is_zero() && best.map_or(true, |(bi, bj)| a[i][j].abs() < a[bi][bj].abs()) {
                    best = Some((i, j));
                }
            }
        }
        let Some((pi, pj)) = best else { break };
        a.swap(t, pi);
        for row in a.iter_mut() {
            row.swap(t, pj);
        }
        loop {
            let mut clean = true;
            for i in t + 1..rows {
                if a[i][t].is_zero() {
                    continue;
                }
                let q = a[i][t].div_floor(&a[t][t]);
                for j in t..cols {
                    let delta = &q * &a[t][j];
                    a[i][j] -= delta;
                }
                if !a[i][t].is_zero() {
                    clean = false;
                }
            }
            for j in t + 1..cols {
                if a[t][j].is_zero() {
                    continue;
                }
                let q = a[t][j].div_floor(&a[t][t]);
                for i in t..rows {
                    let delta = &q * &a[i][t];
                    a[i][j] -= delta;
                }
                if !a[t][j].is_zero() {
                    clean = false;
                }
            }
            if !clean {
                // bring the smallest remainder in row/column t to the pivot
                let mut best = (t, t);
                for i in t + 1..rows {
                    if !a[i][t].is_zero() && a[i][t].abs() < a[best.0][best.1].abs() {
                        best = (i, t);
                    }
                }
                for j in t + 1..cols {
                    if !a[t][j].is_zero() && a[t][j].abs() < a[best.0][best.1].abs() {
                        best = (t, j);
                    }
                }
                if best.0 != t {
                    a.swap(t, best.0);
                }
                if best.1 != t {
                    for row in a.iter_mut() {
                        row.swap(t, best.1);
                    }
                }
                continue;
            }
            let offender = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !a[i][j].is_multiple_of(&a[t][t])));
            match offender {
                Some(i) => {
                    for j in t..cols {
                        let v = a[i][j].clone();
                        a[t][j] += v;
                    }
                }
                None => break,
            }
        }
        diag.push(a[t][t].abs());
        t += 1;
    }
    diag
}

/// Smith normal form diagonal `d_1 | d_2 | ... | d_rank`, zero-padded to `min(rows, cols)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SmithForm {
    pub diagonal: Vec<BigInt>,
    pub rank: usize,
}

pub fn smith_normal_form(m: &IntMatrix) -> SmithForm {
    let mut diagonal = m.to_sparse().invariant_factors();
    let rank = diagonal.len();
    diagonal.resize(m.rows.min(m.cols), BigInt::zero());
    SmithForm { diagonal, rank }
}

/// Faces of a complex per dimension (index 0 holds the empty face) and
/// the boundary maps between them.
#[derive(Clone, Debug)]
pub struct ChainComplex {
    faces: Vec<Vec<u64>>,
}

fn face_signs(face: u64) -> impl Iterator<Item = (u64, i64)> {
    set_of(face)
        .into_iter()
        .enumerate()
        .map(move |(pos, v)| (face & !(1u64 << v), if pos % 2 == 0 { 1 } else { -1 }))
}

impl ChainComplex {
    pub fn new(complex: &SimplicialComplex) -> Result<Self> {
        let mut all: BTreeSet<u64> = BTreeSet::new();
        for f in complex.facets() {
            let fm = mask_of(f);
            if f.len() > 20 || all.len() + (1usize << f.len()) > 4 * MAX_FACES {
                return Err(Error::Capacity(format!(
                    "facet with {} vertices exceeds the face budget",
                    f.len()
                )));
            }
            let mut sub = fm;
            loop {
                all.insert(sub);
                if sub == 0 {
                    break;
                }
                sub = (sub - 1) & fm;
            }
            if all.len() > MAX_FACES {
                return Err(Error::Capacity(format!("complex has more than {MAX_FACES} faces")));
            }
        }
        let top = all.iter().map(|f| f.count_ones() as usize).max();
        let mut faces = vec![Vec::new(); top.map_or(0, |t| t + 1)];
        for f in all {
            faces[f.count_ones() as usize].push(f);
        }
        for level in faces.iter_mut() {
            level.sort_by_key(|&f| set_of(f));
        }
        Ok(ChainComplex { faces })
    }

    /// Highest face dimension, `-1` for the complex holding only the empty face.
    pub fn top_dimension(&self) -> isize {
        self.faces.len() as isize - 2
    }

    /// Faces of dimension `k` (k >= -1), lexicographically ordered, 0-based vertices.
    pub fn faces(&self, k: isize) -> Vec<IndexSet> {
        self.level(k).iter().map(|&f| set_of(f)).collect()
    }

    fn level(&self, k: isize) -> &[u64] {
        let idx = k + 1;
        if idx < 0 || idx as usize >= self.faces.len() {
            &[]
        } else {
            &self.faces[idx as usize]
        }
    }

    fn boundary_entries(&self, k: isize) -> (usize, usize, Vec<(usize, usize, i64)>) {
        let rows = self.level(k - 1);
        let cols = self.level(k);
        let index: HashMap<u64, usize> = rows.iter().enumerate().map(|(i, &f)| (f, i)).collect();
        let mut entries = Vec::new();
        for (j, &f) in cols.iter().enumerate() {
            for (g, s) in face_signs(f) {
                entries.push((index[&g], j, s));
            }
        }
        (rows.len(), cols.len(), entries)
    }

    /// `∂_k : C_k → C_{k-1}`; `k = 0` is the augmentation onto the empty face.
    pub fn boundary(&self, k: isize) -> IntMatrix {
        let (r, c, entries) = self.boundary_entries(k);
        let mut m = IntMatrix::zeros(r, c);
        for (i, j, s) in entries {
            m.set(i, j, BigInt::from(s));
        }
        m
    }

    fn boundary_sparse(&self, k: isize) -> SparseColumns {
        let (r, c, entries) = self.boundary_entries(k);
        let mut m = SparseColumns::new(r, c);
        for (i, j, s) in entries {
            m.insert(i, j, BigInt::from(s));
        }
        m
    }
}

/// `[∂_0, ∂_1, ..., ∂_top]` with faces in lexicographic order.
pub fn boundary_matrices(complex: &SimplicialComplex) -> Result<Vec<IntMatrix>> {
    let cc = ChainComplex::new(complex)?;
    Ok((0..=cc.top_dimension()).map(|k| cc.boundary(k)).collect())
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyGroup {
    pub degree: isize,
    pub betti: usize,
    #[serde(serialize_with = "serialize_bigints")]
    pub torsion: Vec<BigInt>,
}

fn serialize_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> std::result::Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        match i64::try_from(x) {
            Ok(small) => seq.serialize_element(&small)?,
            Err(_) => seq.serialize_element(&x.to_string())?,
        }
    }
    seq.end()
}

impl HomologyGroup {
    pub fn is_trivial(&self) -> bool {
        self.betti == 0 && self.torsion.is_empty()
    }
}

/// Reduced integral homology in degrees `-1 ..= dim`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct HomologyResult {
    pub groups: Vec<HomologyGroup>,
}

impl HomologyResult {
    pub fn group(&self, degree: isize) -> Option<&HomologyGroup> {
        self.groups.iter().find(|g| g.degree == degree)
    }

    pub fn is_trivial(&self) -> bool {
        self.groups.iter().all(HomologyGroup::is_trivial)
    }

    pub fn betti_numbers(&self) -> Vec<usize> {
        self.groups.iter().map(|g| g.betti).collect()
    }
}

pub fn reduced_homology(complex: &SimplicialComplex) -> Result<HomologyResult> {
    let cc = ChainComplex::new(complex)?;
    let top = cc.top_dimension();
    // factors[k + 1] = invariant factors of ∂_k, for k = 0..=top+1
    let mut factors: Vec<Vec<BigInt>> = vec![Vec::new()];
    for k in 0..=top + 1 {
        factors.push(cc.boundary_sparse(k).invariant_factors());
    }
    let rank = |k: isize| -> usize {
        if k < 0 {
            0
        } else {
            factors[(k + 1) as usize].len()
        }
    };
    let groups = (-1..=top.max(-1))
        .map(|k| {
            let dim_c = cc.level(k).len();
            let torsion: Vec<BigInt> = factors[(k + 2) as usize]
                .iter()
                .filter(|d| !d.is_one())
                .cloned()
                .collect();
            HomologyGroup {
                degree: k,
                betti: dim_c - rank(k) - rank(k + 1),
                torsion,
            }
        })
        .collect();
    Ok(HomologyResult { groups })
}

/// True iff the reduced homology is that of `S^{k-1}`: `Z` in degree `k-1`, zero elsewhere.
pub fn verify_sphere_homology(complex: &SimplicialComplex, k: usize) -> Result<bool> {
    let h = reduced_homology(complex)?;
    Ok(homology_is_sphere(&h, k as isize - 1))
}

pub fn homology_is_sphere(h: &HomologyResult, sphere_dim: isize) -> bool {
    h.group(sphere_dim).is_some()
        && h.groups.iter().all(|g| {
            if g.degree == sphere_dim {
                g.betti == 1 && g.torsion.is_empty()
            } else {
                g.is_trivial()
            }
        })
}

/// Lowest vertex lying in every facet: adding it to any face keeps a face.
pub fn cone_apex_detect(complex: &SimplicialComplex) -> Option<usize> {
    let mut facets = complex.facets().iter();
    let first = mask_of(facets.next()?);
    let common = facets.fold(first, |acc, f| acc & mask_of(f));
    (common != 0).then(|| common.trailing_zeros() as usize)
}

/// Euler characteristic of the (unreduced) complex from face counts.
pub fn euler_characteristic(complex: &SimplicialComplex) -> Result<i64> {
    let cc = ChainComplex::new(complex)?;
    Ok((0..=cc.top_dimension())
        .map(|k| {
            let n = cc.level(k).len() as i64;
            if k % 2 == 0 {
                n
            } else {
                -n
            }
        })
        .sum())
}

/// A pure `dim`-dimensional complex with ordered facets; the tuple order
/// times the sign fixes each facet's orientation.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(try_from = "RawTriangulation", into = "RawTriangulation")]
pub struct OrientedTriangulation {
    dim: usize,
    vertex_count: usize,
    facets: Vec<Vec<usize>>,
    signs: Vec<i8>,
}

#[derive(Serialize, Deserialize)]
struct RawTriangulation {
    dim: usize,
    vertex_count: usize,
    facets: Vec<Vec<usize>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    signs: Option<Vec<i8>>,
}

impl TryFrom<RawTriangulation> for OrientedTriangulation {
    type Error = Error;

    fn try_from(raw: RawTriangulation) -> Result<Self> {
        let mut facets = Vec::with_capacity(raw.facets.len());
        for (f, facet) in raw.facets.into_iter().enumerate() {
            let mut zero = Vec::with_capacity(facet.len());
            for v in facet {
                if v == 0 {
                    return Err(Error::input(format!("facet {}: vertex ids are 1-based", f + 1)));
                }
                zero.push(v - 1);
            }
            facets.push(zero);
        }
        OrientedTriangulation::with_signs(raw.dim, raw.vertex_count, facets, raw.signs)
    }
}

impl From<OrientedTriangulation> for RawTriangulation {
    fn from(t: OrientedTriangulation) -> Self {
        let all_positive = t.signs.iter().all(|&s| s == 1);
        RawTriangulation {
            dim: t.dim,
            vertex_count: t.vertex_count,
            facets: t
                .facets
                .into_iter()
                .map(|f| f.into_iter().map(|v| v + 1).collect())
                .collect(),
            signs: (!all_positive).then_some(t.signs),
        }
    }
}

pub(crate) fn permutation_parity(v: &[usize]) -> i8 {
    let mut inversions = 0;
    for i in 0..v.len() {
        for j in i + 1..v.len() {
            if v[i] > v[j] {
                inversions += 1;
            }
        }
    }
    if inversions % 2 == 0 {
        1
    } else {
        -1
    }
}

impl OrientedTriangulation {
    pub fn new(dim: usize, vertex_count: usize, facets: Vec<Vec<usize>>) -> Result<Self> {
        Self::with_signs(dim, vertex_count, facets, None)
    }

    pub fn with_signs(
        dim: usize,
        vertex_count: usize,
        facets: Vec<Vec<usize>>,
        signs: Option<Vec<i8>>,
    ) -> Result<Self> {
        for (f, facet) in facets.iter().enumerate() {
            if facet.len() != dim + 1 {
                return Err(Error::input(format!(
                    "facet {} has {} vertices, expected {}",
                    f + 1,
                    facet.len(),
                    dim + 1
                )));
            }
            if let Some(&v) = facet.iter().find(|&&v| v >= vertex_count) {
                return Err(Error::input(format!(
                    "facet {}: vertex {} out of range 1..={vertex_count}",
                    f + 1,
                    v + 1
                )));
            }
            let distinct: BTreeSet<usize> = facet.iter().copied().collect();
            if distinct.len() != facet.len() {
                return Err(Error::input(format!("facet {} repeats a vertex", f + 1)));
            }
        }
        let signs = match signs {
            Some(s) => {
                if s.len() != facets.len() {
                    return Err(Error::input("one sign per facet required"));
                }
                if s.iter().any(|&x| x != 1 && x != -1) {
                    return Err(Error::input("facet signs must be +1 or -1"));
                }
                s
            }
            None => vec![1; facets.len()],
        };
        Ok(OrientedTriangulation {
            dim,
            vertex_count,
            facets,
            signs,
        })
    }

    /// Orients each facet positively with respect to the given vertex coordinates.
    pub fn oriented_by_coordinates(facets: Vec<Vec<usize>>, coords: &[RationalVector]) -> Result<Self> {
        let dim = coords.first().map_or(0, |c| c.len());
        let mut signs = Vec::with_capacity(facets.len());
        for (f, facet) in facets.iter().enumerate() {
            if facet.len() != dim + 1 {
                return Err(Error::input(format!("facet {} is not a {dim}-simplex", f + 1)));
            }
            let base = &coords[facet[0]];
            let rows: Vec<RationalVector> = facet[1..].iter().map(|&v| rational::sub(&coords[v], base)).collect();
            match rational::sign(&rational::determinant(rows)) {
                0 => return Err(Error::input(format!("facet {} is degenerate", f + 1))),
                s => signs.push(s as i8),
            }
        }
        Self::with_signs(dim, coords.len(), facets, Some(signs))
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    pub fn facets(&self) -> &[Vec<usize>] {
        &self.facets
    }

    pub fn signs(&self) -> &[i8] {
        &self.signs
    }

    pub fn len(&self) -> usize {
        self.facets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.facets.is_empty()
    }

    /// Same facets with every orientation flipped.
    pub fn reversed(&self) -> Self {
        OrientedTriangulation {
            signs: self.signs.iter().map(|s| -s).collect(),
            ..self.clone()
        }
    }

    /// Restriction to a subset of facets (by index), keeping vertex ids.
    pub fn sub_triangulation(&self, facet_ids: &[usize]) -> Self {
        OrientedTriangulation {
            dim: self.dim,
            vertex_count: self.vertex_count,
            facets: facet_ids.iter().map(|&f| self.facets[f].clone()).collect(),
            signs: facet_ids.iter().map(|&f| self.signs[f]).collect(),
        }
    }

    /// Induced orientations of codimension-one faces, keyed by the sorted face.
    fn face_incidences(&self) -> BTreeMap<Vec<usize>, Vec<i8>> {
        let mut map: BTreeMap<Vec<usize>, Vec<i8>> = BTreeMap::new();
        for (facet, &s) in self.facets.iter().zip(&self.signs) {
            for j in 0..facet.len() {
                let face: Vec<usize> = facet
                    .iter()
                    .enumerate()
                    .filter(|&(p, _)| p != j)
                    .map(|(_, &v)| v)
                    .collect();
                let sign = s * if j % 2 == 0 { 1 } else { -1 } * permutation_parity(&face);
                let mut key = face;
                key.sort_unstable();
                map.entry(key).or_default().push(sign);
            }
        }
        map
    }

    /// Oriented boundary of a coherently oriented pseudomanifold with boundary.
    pub fn boundary(&self) -> Result<OrientedTriangulation> {
        if self.dim == 0 {
            return Err(Error::input("a 0-dimensional triangulation has no boundary complex"));
        }
        let mut facets = Vec::new();
        let mut signs = Vec::new();
        for (face, inc) in self.face_incidences() {
            match inc.as_slice() {
                [s] => {
                    facets.push(face);
                    signs.push(*s);
                }
                [a, b] if a + b == 0 => {}
                [_, _] => {
                    return Err(Error::input(format!(
                        "incoherent orientation across face {:?}",
                        face.iter().map(|v| v + 1).collect::<Vec<_>>()
                    )))
                }
                _ => {
                    return Err(Error::input(format!(
                        "face {:?} lies in {} facets",
                        face.iter().map(|v| v + 1).collect::<Vec<_>>(),
                        inc.len()
                    )))
                }
            }
        }
        Self::with_signs(self.dim - 1, self.vertex_count, facets, Some(signs))
    }

    /// Every codimension-one face lies in exactly two facets with opposite induced orientations.
    pub fn is_coherent_closed(&self) -> bool {
        self.face_incidences()
            .values()
            .all(|inc| matches!(inc.as_slice(), [a, b] if a + b == 0))
    }

    /// Signed incidences cancel on every codimension-one face: a cycle, possibly pinched.
    pub fn is_cycle(&self) -> bool {
        self.face_incidences()
            .values()
            .all(|inc| inc.iter().map(|&s| s as i32).sum::<i32>() == 0)
    }

    /// The underlying unoriented complex.
    pub fn complex(&self) -> SimplicialComplex {
        SimplicialComplex::from_faces(
            self.vertex_count,
            self.facets
                .iter()
                .map(|f| {
                    let mut s = f.clone();
                    s.sort_unstable();
                    s
                })
                .collect(),
        )
        .expect("validated triangulation")
    }
}

pub fn orientation_coherence_check(tri: &OrientedTriangulation) -> bool {
    tri.is_coherent_closed()
}

/// Vertices `0..n` arranged in a single cycle `0 → 1 → ... → n-1 → 0`.
pub fn cycle(n: usize) -> OrientedTriangulation {
    OrientedTriangulation::new(1, n, (0..n).map(|i| vec![i, (i + 1) % n]).collect()).expect("valid cycle")
}

/// Boundary of the cross-polytope in `R^3` with outward orientation.
///
/// Vertices: `0 = +e1, 1 = +e2, 2 = +e3, 3 = -e1, 4 = -e2, 5 = -e3`.
pub fn octahedron() -> OrientedTriangulation {
    let mut facets = Vec::new();
    let mut signs = Vec::new();
    for sx in [0usize, 3] {
        for sy in [1usize, 4] {
            for sz in [2usize, 5] {
                let flips = (sx == 3) as i8 + (sy == 4) as i8 + (sz == 5) as i8;
                facets.push(vec![sx, sy, sz]);
                signs.push(if flips % 2 == 0 { 1 } else { -1 });
            }
        }
    }
    OrientedTriangulation::with_signs(2, 6, facets, Some(signs)).expect("valid octahedron")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complex(n: usize, facets: &[&[usize]]) -> SimplicialComplex {
        SimplicialComplex::from_faces(n, facets.iter().map(|f| f.to_vec()).collect()).unwrap()
    }

    fn four_cycle() -> SimplicialComplex {
        complex(4, &[&[0, 1], &[1, 2], &[2, 3], &[0, 3]])
    }

    #[test]
    fn edge_and_triangle_boundaries() {
        let bm = boundary_matrices(&complex(2, &[&[0, 1]])).unwrap();
        assert_eq!(bm[1], IntMatrix::from_rows(&[vec![-1], vec![1]]));
        let bm = boundary_matrices(&SimplicialComplex::simplex(3)).unwrap();
        assert_eq!(bm[2], IntMatrix::from_rows(&[vec![1], vec![-1], vec![1]]));
        let bm = boundary_matrices(&four_cycle()).unwrap();
        let d1 = &bm[1];
        assert_eq!((d1.rows(), d1.cols()), (4, 4));
        for j in 0..4 {
            let col: Vec<i64> = (0..4).map(|i| i64::try_from(d1.get(i, j)).unwrap()).collect();
            assert_eq!(col.iter().filter(|&&x| x == -1).count(), 1);
            assert_eq!(col.iter().filter(|&&x| x == 1).count(), 1);
        }
    }

    #[test]
    fn boundary_squares_to_zero() {
        let bm = boundary_matrices(&SimplicialComplex::simplex(5)).unwrap();
        for k in 1..bm.len() {
            assert!(bm[k - 1].mul(&bm[k]).is_zero());
        }
    }

    #[test]
    fn smith_examples() {
        let s = smith_normal_form(&IntMatrix::from_rows(&[vec![2, 4], vec![6, 8]]));
        assert_eq!(s.diagonal, vec![BigInt::from(2), BigInt::from(4)]);
        assert_eq!(s.rank, 2);
        let s = smith_normal_form(&IntMatrix::zeros(2, 3));
        assert_eq!(s.rank, 0);
        assert!(s.diagonal.iter().all(Zero::is_zero));
        let s = smith_normal_form(&IntMatrix::identity(3));
        assert_eq!(s.diagonal, vec![BigInt::one(); 3]);
        assert_eq!(s.rank, 3);
    }

    #[test]
    fn homology_examples() {
        let h = reduced_homology(&four_cycle()).unwrap();
        assert!(h.group(0).unwrap().is_trivial());
        assert_eq!(h.group(1).unwrap().betti, 1);
        assert!(reduced_homology(&SimplicialComplex::simplex(4)).unwrap().is_trivial());
        let octa = octahedron().complex();
        let h = reduced_homology(&octa).unwrap();
        assert_eq!(h.betti_numbers(), vec![0, 0, 0, 1]);
        assert!(h.groups.iter().all(|g| g.torsion.is_empty()));
    }

    #[test]
    fn void_and_empty_face() {
        let empty_face = complex(2, &[&[]]);
        let h = reduced_homology(&empty_face).unwrap();
        assert_eq!(h.group(-1).unwrap().betti, 1);
        assert!(verify_sphere_homology(&empty_face, 0).unwrap());
        let two_points = complex(2, &[&[0], &[1]]);
        assert!(verify_sphere_homology(&two_points, 1).unwrap());
        assert!(!verify_sphere_homology(&two_points, 0).unwrap());
    }

    #[test]
    fn projective_plane_has_torsion() {
        // 6-vertex RP^2
        let rp2 = complex(
            6,
            &[
                &[0, 1, 2],
                &[0, 2, 3],
                &[0, 3, 4],
                &[0, 4, 5],
                &[0, 1, 5],
                &[1, 2, 4],
                &[2, 3, 5],
                &[1, 3, 4],
                &[2, 4, 5],
                &[1, 3, 5],
            ],
        );
        let h = reduced_homology(&rp2).unwrap();
        assert_eq!(h.group(1).unwrap().torsion, vec![BigInt::from(2)]);
        assert_eq!(h.group(1).unwrap().betti, 0);
        assert_eq!(h.group(2).unwrap().betti, 0);
        assert_eq!(euler_characteristic(&rp2).unwrap(), 1);
    }

    #[test]
    fn sphere_checks() {
        assert!(verify_sphere_homology(&four_cycle(), 2).unwrap());
        assert!(!verify_sphere_homology(&four_cycle(), 1).unwrap());
        for k in 1..4 {
            assert!(!verify_sphere_homology(&SimplicialComplex::simplex(4), k).unwrap());
        }
    }

    #[test]
    fn cone_apices() {
        assert_eq!(cone_apex_detect(&SimplicialComplex::simplex(4)), Some(0));
        assert_eq!(cone_apex_detect(&complex(4, &[&[0, 2, 3], &[1, 2, 3]])), Some(2));
        assert_eq!(cone_apex_detect(&four_cycle()), None);
    }

    #[test]
    fn coherence() {
        let good = OrientedTriangulation::new(1, 3, vec![vec![0, 1], vec![1, 2], vec![2, 0]]).unwrap();
        assert!(orientation_coherence_check(&good));
        let bad = OrientedTriangulation::new(1, 3, vec![vec![0, 1], vec![2, 1], vec![2, 0]]).unwrap();
        assert!(!orientation_coherence_check(&bad));
        assert!(orientation_coherence_check(&octahedron()));
        assert!(!orientation_coherence_check(
            &octahedron().sub_triangulation(&[0, 1, 2])
        ));
        assert!(orientation_coherence_check(&good.reversed()));
    }

    #[test]
    fn boundary_of_disk() {
        // two triangles forming a square, positively oriented
        let disk = OrientedTriangulation::new(2, 4, vec![vec![0, 1, 2], vec![0, 2, 3]]).unwrap();
        let b = disk.boundary().unwrap();
        assert_eq!(b.len(), 4);
        assert!(orientation_coherence_check(&b));
        let seg = OrientedTriangulation::new(1, 2, vec![vec![0, 1]]).unwrap();
        let ends = seg.boundary().unwrap();
        assert_eq!(ends.facets(), &[vec![0], vec![1]]);
        assert_eq!(ends.signs(), &[-1, 1]);
        assert!(orientation_coherence_check(&ends));
    }

    #[test]
    fn triangulation_json_is_one_based() {
        let t: OrientedTriangulation =
            serde_json::from_str(r#"{"dim":1,"vertex_count":3,"facets":[[1,2],[2,3],[3,1]]}"#).unwrap();
        assert_eq!(t, cycle(3));
        assert!(
            serde_json::from_str::<OrientedTriangulation>(r#"{"dim":1,"vertex_count":3,"facets":[[0,1]]}"#).is_err()
        );
        let back = serde_json::to_string(&t).unwrap();
        assert_eq!(back, r#"{"dim":1,"vertex_count":3,"facets":[[1,2],[2,3],[3,1]]}"#);
    }
}
