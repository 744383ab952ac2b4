//! Exact rational linear algebra: matrices, canonical subspaces and
//! congruence diagonalization of symmetric forms. No floating point.

pub mod congruence;
pub mod matrix;
pub mod rational;
pub mod subspace;

pub use congruence::{diagonalize, inertia, Diagonalization, Inertia};
pub use matrix::{bareiss_determinant, RationalMatrix};
pub use rational::{Rational, RatVec};
pub use subspace::Subspace;
