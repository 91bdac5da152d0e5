//! Exact convex-position predicates: hull membership with certificates,
//! affine rank and relative-interior membership.

use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::error::{Error, Result};
use crate::lp::{self, LpOutcome};
use crate::rational::{self, Rational, RationalVector};

/// Outcome of a convex-hull membership query, with an exact certificate.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "result", rename_all = "snake_case")]
pub enum ConvexMembership {
    /// Convex coefficients reproducing the query point, one per input point.
    Inside {
        #[serde(with = "rational::serde_vector")]
        coefficients: RationalVector,
    },
    /// Integer direction `u` with `⟨u, v − r⟩ > 0` for every queried `v`.
    Outside {
        #[serde(with = "rational::serde_vector")]
        direction: RationalVector,
    },
}

impl ConvexMembership {
    pub fn is_inside(&self) -> bool {
        matches!(self, ConvexMembership::Inside { .. })
    }

    /// Checks the certificate by substitution.
    pub fn verify(&self, points: &[RationalVector], r: &[Rational]) -> bool {
        match self {
            ConvexMembership::Inside { coefficients } => {
                if coefficients.len() != points.len()
                    || coefficients.iter().any(|c| c.is_negative())
                    || coefficients.iter().sum::<Rational>() != Rational::one()
                {
                    return false;
                }
                (0..r.len()).all(|k| {
                    let s: Rational = coefficients.iter().zip(points).map(|(c, p)| c * &p[k]).sum();
                    s == r[k]
                })
            }
            ConvexMembership::Outside { direction } => points
                .iter()
                .all(|p| rational::dot(direction, &rational::sub(p, r)).is_positive()),
        }
    }
}

fn check_dims(points: &[RationalVector], r: &[Rational]) -> Result<()> {
    if points.is_empty() {
        return Err(Error::input("empty point list"));
    }
    if let Some((i, p)) = points.iter().enumerate().find(|(_, p)| p.len() != r.len()) {
        return Err(Error::input(format!(
            "point {} has dimension {}, expected {}",
            i + 1,
            p.len(),
            r.len()
        )));
    }
    Ok(())
}

/// Decides `r ∈ conv(points)` by exact phase-one simplex.
pub fn conv_membership(points: &[RationalVector], r: &[Rational]) -> Result<ConvexMembership> {
    check_dims(points, r)?;
    if let Some(i) = points.iter().position(|p| p.as_slice() == r) {
        let mut coefficients = vec![Rational::zero(); points.len()];
        coefficients[i] = Rational::one();
        return Ok(ConvexMembership::Inside { coefficients });
    }
    let d = r.len();
    let mut a: Vec<RationalVector> = (0..d).map(|k| points.iter().map(|p| p[k].clone()).collect()).collect();
    a.push(vec![Rational::one(); points.len()]);
    let mut b = r.to_vec();
    b.push(Rational::one());
    let result = match lp::feasible(&a, &b) {
        LpOutcome::Optimal { x, .. } => ConvexMembership::Inside { coefficients: x },
        LpOutcome::Infeasible { farkas } => {
            // yᵀ[v;1] <= 0 < yᵀ[r;1] gives ⟨−y_coords, v − r⟩ > 0.
            let u: RationalVector = farkas[..d].iter().map(|x| -x).collect();
            ConvexMembership::Outside {
                direction: rational::primitive_integer_direction(&u),
            }
        }
        LpOutcome::Unbounded => unreachable!("feasibility problem has zero objective"),
    };
    debug_assert!(result.verify(points, r));
    Ok(result)
}

/// Dimension of the affine hull of `points`.
pub fn affine_rank(points: &[RationalVector]) -> Result<usize> {
    let base = points.first().ok_or_else(|| Error::input("empty point list"))?;
    if points.iter().any(|p| p.len() != base.len()) {
        return Err(Error::input("points of differing dimension"));
    }
    let rows: Vec<RationalVector> = points[1..].iter().map(|p| rational::sub(p, base)).collect();
    Ok(matrix_rank(rows))
}

pub(crate) fn matrix_rank(mut rows: Vec<RationalVector>) -> usize {
    let ncols = rows.first().map_or(0, |r| r.len());
    let mut rank = 0;
    for col in 0..ncols {
        let Some(p) = (rank..rows.len()).find(|&r| !rows[r][col].is_zero()) else {
            continue;
        };
        rows.swap(rank, p);
        let pivot = rows[rank][col].clone();
        for r in rank + 1..rows.len() {
            if rows[r][col].is_zero() {
                continue;
            }
            let f = &rows[r][col] / &pivot;
            for c in col..ncols {
                let delta = &f * &rows[rank][c];
                rows[r][c] -= delta;
            }
        }
        rank += 1;
    }
    rank
}

/// Convex coefficients that are all strictly positive, if any exist.
pub fn relint_witness(points: &[RationalVector], r: &[Rational]) -> Result<Option<RationalVector>> {
    check_dims(points, r)?;
    let m = points.len();
    let d = r.len();
    // λ_i = μ_i + t with μ >= 0, t >= 0; maximize t.
    let mut a: Vec<RationalVector> = (0..d)
        .map(|k| {
            let mut row: RationalVector = points.iter().map(|p| p[k].clone()).collect();
            row.push(points.iter().map(|p| p[k].clone()).sum());
            row
        })
        .collect();
    let mut ones = vec![Rational::one(); m];
    ones.push(Rational::from_integer(m.into()));
    a.push(ones);
    let mut b = r.to_vec();
    b.push(Rational::one());
    let mut c = vec![Rational::zero(); m];
    c.push(-Rational::one());
    match lp::solve(&a, &b, &c) {
        LpOutcome::Optimal { x, .. } => {
            let t = &x[m];
            if t.is_positive() {
                Ok(Some(x[..m].iter().map(|mu| mu + t).collect()))
            } else {
                Ok(None)
            }
        }
        LpOutcome::Infeasible { .. } => Ok(None),
        LpOutcome::Unbounded => unreachable!("t is bounded by 1/m"),
    }
}

/// True iff `r` is a convex combination of `points` with every coefficient positive.
pub fn relint_membership(points: &[RationalVector], r: &[Rational]) -> Result<bool> {
    Ok(relint_witness(points, r)?.is_some())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{ivec, ratio};

    fn square() -> Vec<RationalVector> {
        vec![ivec(&[1, 0]), ivec(&[0, 1]), ivec(&[-1, 0]), ivec(&[0, -1])]
    }

    #[test]
    fn segment_membership_coefficients() {
        let pts = vec![ivec(&[-1]), ivec(&[2])];
        let res = conv_membership(&pts, &ivec(&[0])).unwrap();
        assert_eq!(
            res,
            ConvexMembership::Inside {
                coefficients: vec![ratio(2, 3), ratio(1, 3)]
            }
        );
    }

    #[test]
    fn single_point_outside() {
        let pts = vec![ivec(&[1, 0])];
        let res = conv_membership(&pts, &ivec(&[0, 0])).unwrap();
        assert!(res.verify(&pts, &ivec(&[0, 0])));
        assert!(!res.is_inside());
    }

    #[test]
    fn symmetric_pair() {
        let pts = vec![ivec(&[1, 0]), ivec(&[-1, 0])];
        let res = conv_membership(&pts, &ivec(&[0, 0])).unwrap();
        assert_eq!(
            res,
            ConvexMembership::Inside {
                coefficients: vec![ratio(1, 2), ratio(1, 2)]
            }
        );
    }

    #[test]
    fn member_point_gets_unit_coefficients() {
        let pts = square();
        let res = conv_membership(&pts, &ivec(&[0, 1])).unwrap();
        assert_eq!(
            res,
            ConvexMembership::Inside {
                coefficients: vec![int(0), int(1), int(0), int(0)]
            }
        );
    }

    #[test]
    fn dimension_errors() {
        assert!(matches!(
            conv_membership(&[ivec(&[1, 2])], &ivec(&[0])),
            Err(Error::Input(_))
        ));
        assert!(matches!(conv_membership(&[], &ivec(&[0])), Err(Error::Input(_))));
        assert!(matches!(affine_rank(&[]), Err(Error::Input(_))));
    }

    #[test]
    fn ranks() {
        assert_eq!(affine_rank(&square()).unwrap(), 2);
        assert_eq!(affine_rank(&[ivec(&[0, 0]), ivec(&[1, 1]), ivec(&[2, 2])]).unwrap(), 1);
        assert_eq!(affine_rank(&[ivec(&[5, 7])]).unwrap(), 0);
    }

    #[test]
    fn relative_interior() {
        let sq = square();
        let w = relint_witness(&sq, &ivec(&[0, 0])).unwrap().unwrap();
        assert!(w.iter().all(|c| c.is_positive()));
        assert!(!relint_membership(&sq, &[ratio(1, 2), ratio(1, 2)]).unwrap());
        assert!(!relint_membership(&sq, &ivec(&[2, 0])).unwrap());
        // a segment in the plane: its midpoint is relative-interior
        let seg = vec![ivec(&[0, 0]), ivec(&[2, 2])];
        assert!(relint_membership(&seg, &ivec(&[1, 1])).unwrap());
        assert!(relint_membership(&[ivec(&[3, 3])], &ivec(&[3, 3])).unwrap());
    }

    use crate::rational::int;
}
