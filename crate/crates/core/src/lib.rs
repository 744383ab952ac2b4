//! Exact computations around flats, hyperplanes and isometries of rational
//! quadratic lattices of signature `(p, q)`.

pub mod arrangement;
pub mod error;
pub mod exactla;
pub mod grassmann;
pub mod isometry;
pub mod obstruct;
pub mod qlattice;
pub mod signcalc;
pub mod verify;

pub use error::{Error, Result};
pub use exactla::{Inertia, Rational, RatVec, RationalMatrix, Subspace};
pub use grassmann::{Flat, GrPoint, Hyperplane, IntersectionVerdict, NClause, VerdictTag};
pub use isometry::{Isometry, SquareClass};
pub use qlattice::{LatticeClass, LatticeKind, Parity, QuadLattice};
