//! Seeded generators shared by the integration suites.
#![allow(dead_code)]

use balcov::degree::WeightedCover;
use balcov::rational::{int, Rational, RationalVector};
use balcov::simplicial::cycle;
use balcov::{OrientedTriangulation, PointConfig};
use num_traits::Zero;
use rand::Rng;

pub fn random_points<R: Rng>(rng: &mut R, d: usize, m: usize, range: i64) -> Vec<RationalVector> {
    (0..m)
        .map(|_| (0..d).map(|_| int(rng.gen_range(-range..=range))).collect())
        .collect()
}

/// Full-rank configuration with `r` a strictly positive convex combination of all points.
pub fn random_interior_config<R: Rng>(rng: &mut R, d: usize, m: usize) -> PointConfig {
    loop {
        let pts = random_points(rng, d, m, 5);
        let weights: Vec<i64> = (0..m).map(|_| rng.gen_range(1..=9)).collect();
        let total = Rational::from_integer(weights.iter().sum::<i64>().into());
        let mut r = vec![Rational::zero(); d];
        for (p, &w) in pts.iter().zip(&weights) {
            for k in 0..d {
                r[k] += &p[k] * int(w) / &total;
            }
        }
        let cfg = PointConfig::new(d, pts, r).unwrap();
        if cfg.rank() == d {
            return cfg;
        }
    }
}

/// Full-rank configuration with `r` outside the relative interior: either far
/// outside the hull or at a vertex of it.
pub fn random_exterior_config<R: Rng>(rng: &mut R, d: usize, m: usize) -> PointConfig {
    loop {
        let pts = random_points(rng, d, m, 5);
        let r: RationalVector = if rng.gen_bool(0.5) {
            (0..d)
                .map(|_| int(rng.gen_range(6..=9) * if rng.gen_bool(0.5) { 1 } else { -1 }))
                .collect()
        } else {
            pts.iter().max().unwrap().clone()
        };
        let cfg = PointConfig::new(d, pts, r).unwrap();
        if cfg.rank() == d && !cfg.base_in_relint() {
            return cfg;
        }
    }
}

/// Any configuration, `r` a random small rational point.
pub fn random_config<R: Rng>(rng: &mut R, d: usize, m: usize) -> PointConfig {
    let pts = random_points(rng, d, m, 4);
    let r = (0..d)
        .map(|_| Rational::new(rng.gen_range(-8..=8).into(), rng.gen_range(1..=3).into()))
        .collect();
    PointConfig::new(d, pts, r).unwrap()
}

/// Planar configuration around `r = 0`, full rank, `r` interior, no point at `r`.
pub fn random_planar_config<R: Rng>(rng: &mut R) -> PointConfig {
    loop {
        let m = rng.gen_range(3..=7);
        let pts = random_points(rng, 2, m, 6);
        if pts.iter().any(|p| p.iter().all(Zero::is_zero)) {
            continue;
        }
        let cfg = PointConfig::new(2, pts, vec![int(0), int(0)]).unwrap();
        if cfg.rank() == 2 && cfg.base_in_relint() && !has_opposite_neighbours(&cfg) {
            return cfg;
        }
    }
}

/// Two angularly consecutive points on opposite rays through `r` make the
/// steepest-direction coloring degenerate along a whole line.
fn has_opposite_neighbours(cfg: &PointConfig) -> bool {
    let order = balcov::degree::angular_order(cfg);
    let p = cfg.points();
    (0..order.len()).any(|i| {
        let (a, b) = (&p[order[i]], &p[order[(i + 1) % order.len()]]);
        let cross = &a[0] * &b[1] - &a[1] * &b[0];
        let dot = balcov::rational::dot(a, b);
        cross.is_zero() && dot < Rational::zero()
    })
}

pub fn random_coloring<R: Rng>(rng: &mut R, len: usize, m: usize) -> Vec<usize> {
    (0..len).map(|_| rng.gen_range(0..m)).collect()
}

/// A cycle of the given length with uniformly random colors.
pub fn random_colored_cycle<R: Rng>(rng: &mut R, len: usize, m: usize) -> (OrientedTriangulation, WeightedCover) {
    let colors = random_coloring(rng, len, m);
    (cycle(len), WeightedCover::from_coloring(m, &colors).unwrap())
}

/// `r + A (v - r)` for a random integer matrix `A` with nonzero determinant.
pub fn random_linear_image<R: Rng>(rng: &mut R, cfg: &PointConfig) -> PointConfig {
    let d = cfg.dim();
    loop {
        let a: Vec<RationalVector> = (0..d)
            .map(|_| (0..d).map(|_| int(rng.gen_range(-3..=3))).collect())
            .collect();
        if balcov::rational::determinant(a.clone()).is_zero() {
            continue;
        }
        let r = cfg.base().to_vec();
        let pts = cfg
            .points()
            .iter()
            .map(|v| {
                let w = balcov::rational::sub(v, &r);
                let img: RationalVector = a.iter().map(|row| balcov::rational::dot(row, &w)).collect();
                balcov::rational::add(&img, &r)
            })
            .collect();
        return PointConfig::new(d, pts, r).unwrap();
    }
}
