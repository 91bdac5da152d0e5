//! Dense exact simplex for `minimize c·x  s.t.  A x = b, x >= 0`.
//!
//! Two phases over a full tableau that keeps the artificial columns, so the
//! simplex multipliers can be read back from the reduced-cost row. Bland's
//! rule throughout; cycling is impossible.

use num_traits::{One, Signed, Zero};

use crate::rational::{Rational, RationalVector};

#[derive(Clone, Debug)]
pub enum LpOutcome {
    Optimal {
        x: RationalVector,
        value: Rational,
        /// Multipliers `y` with `c - Aᵀy >= 0` on every column.
        dual: RationalVector,
    },
    /// `y` with `yᵀA <= 0` componentwise and `yᵀb > 0`.
    Infeasible {
        farkas: RationalVector,
    },
    Unbounded,
}

struct Tableau {
    rows: Vec<RationalVector>,
    rhs: RationalVector,
    basis: Vec<usize>,
    /// Number of structural (non-artificial) columns.
    n: usize,
}

impl Tableau {
    fn ncols(&self) -> usize {
        self.n + self.rows.len()
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let p = self.rows[row][col].clone();
        for x in self.rows[row].iter_mut() {
            *x /= &p;
        }
        self.rhs[row] /= &p;
        for r in 0..self.rows.len() {
            if r == row || self.rows[r][col].is_zero() {
                continue;
            }
            let f = self.rows[r][col].clone();
            for c in 0..self.ncols() {
                if self.rows[row][c].is_zero() {
                    continue;
                }
                let delta = &f * &self.rows[row][c];
                self.rows[r][c] -= delta;
            }
            let delta = &f * &self.rhs[row];
            self.rhs[r] -= delta;
        }
        self.basis[row] = col;
    }

    fn reduced_costs(&self, cost: &[Rational]) -> RationalVector {
        (0..self.ncols())
            .map(|j| {
                let mut r = cost[j].clone();
                for (i, &b) in self.basis.iter().enumerate() {
                    if !cost[b].is_zero() && !self.rows[i][j].is_zero() {
                        r -= &cost[b] * &self.rows[i][j];
                    }
                }
                r
            })
            .collect()
    }

    fn objective(&self, cost: &[Rational]) -> Rational {
        self.basis.iter().zip(&self.rhs).map(|(&b, v)| &cost[b] * v).sum()
    }

    /// Runs Bland's rule until optimal; `false` when unbounded.
    fn optimize(&mut self, cost: &[Rational], allowed: usize) -> bool {
        loop {
            let reduced = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| reduced[j].is_negative()) else {
                return true;
            };
            let mut leave: Option<(usize, Rational)> = None;
            for i in 0..self.rows.len() {
                let a = &self.rows[i][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.rhs[i] / a;
                let better = match &leave {
                    None => true,
                    Some((li, lr)) => ratio < *lr || (ratio == *lr && self.basis[i] < self.basis[*li]),
                };
                if better {
                    leave = Some((i, ratio));
                }
            }
            match leave {
                Some((row, _)) => self.pivot(row, enter),
                None => return false,
            }
        }
    }
}

/// Solves `minimize c·x s.t. A x = b, x >= 0` exactly.
pub fn solve(a: &[RationalVector], b: &[Rational], c: &[Rational]) -> LpOutcome {
    let m = a.len();
    let n = c.len();
    let mut signs = vec![Rational::one(); m];
    let mut rows = Vec::with_capacity(m);
    let mut rhs = Vec::with_capacity(m);
    for i in 0..m {
        let flip = b[i].is_negative();
        if flip {
            signs[i] = -Rational::one();
        }
        let mut row: RationalVector = a[i].iter().map(|x| if flip { -x } else { x.clone() }).collect();
        row.extend((0..m).map(|k| if k == i { Rational::one() } else { Rational::zero() }));
        rows.push(row);
        rhs.push(if flip { -&b[i] } else { b[i].clone() });
    }
    let mut t = Tableau {
        rows,
        rhs,
        basis: (n..n + m).collect(),
        n,
    };

    let mut phase1 = vec![Rational::zero(); n];
    phase1.extend(std::iter::repeat(Rational::one()).take(m));
    t.optimize(&phase1, n + m);
    let infeasibility = t.objective(&phase1);
    if infeasibility.is_positive() {
        let reduced = t.reduced_costs(&phase1);
        let farkas = (0..m)
            .map(|i| (Rational::one() - &reduced[n + i]) * &signs[i])
            .collect();
        return LpOutcome::Infeasible { farkas };
    }

    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and stay inert.
    for i in 0..m {
        if t.basis[i] >= n {
            if let Some(j) = (0..n).find(|&j| !t.rows[i][j].is_zero()) {
                t.pivot(i, j);
            }
        }
    }

    let mut phase2 = c.to_vec();
    phase2.extend(std::iter::repeat(Rational::zero()).take(m));
    if !t.optimize(&phase2, n) {
        return LpOutcome::Unbounded;
    }
    let mut x = vec![Rational::zero(); n];
    for (i, &bcol) in t.basis.iter().enumerate() {
        if bcol < n {
            x[bcol] = t.rhs[i].clone();
        }
    }
    let reduced = t.reduced_costs(&phase2);
    let dual = (0..m).map(|i| -&reduced[n + i] * &signs[i]).collect();
    let value = t.objective(&phase2);
    LpOutcome::Optimal { x, value, dual }
}

/// Phase one only: a feasible point or a Farkas certificate.
pub fn feasible(a: &[RationalVector], b: &[Rational]) -> LpOutcome {
    let n = a.first().map_or(0, |r| r.len());
    solve(a, b, &vec![Rational::zero(); n])
}
