//! Exact computations around `r`-balanced subsets of point configurations:
//! hull membership with certificates, the complex of non-balanced subsets
//! and its homology, PL degrees of covers relative to `(V, r)`, and the
//! Sperner / KKM / KKMS and index-additivity checkers built on top.
//!
//! All arithmetic is exact (`BigRational` / `BigInt`). Point and vertex
//! indices are 0-based in the API and 1-based in every JSON payload.

#![allow(clippy::needless_range_loop)]

pub mod applications;
pub mod balanced;
pub mod cli;
pub mod degree;
pub mod error;
pub mod geometry;
pub mod index_field;
pub mod lp;
pub mod rational;
pub mod simplicial;

pub use balanced::{BalancedProfile, IndexSet, PointConfig, SimplicialComplex};
pub use degree::{DegreeResult, RayCertificate, WeightedCover};
pub use error::{Error, Result};
pub use geometry::ConvexMembership;
pub use rational::{Rational, RationalVector};
pub use simplicial::{HomologyResult, OrientedTriangulation};
