use thiserror::Error;

/// Errors produced by the geocycle library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("gram matrix is not symmetric at ({0}, {1})")]
    NotSymmetric(usize, usize),
    #[error("gram matrix is degenerate (determinant 0)")]
    DegenerateForm,
    #[error("unknown lattice kind `{0}`")]
    UnknownKind(String),
    #[error("lattice kind `{0}` requires parameters p and q with p, q >= 1")]
    MissingParams(String),

    #[error("matrix does not preserve the form")]
    FormNotPreserved,
    #[error("vector is isotropic (x.x = 0)")]
    IsotropicVector,
    #[error("matrix has non-integral entries")]
    NonIntegralMatrix,
    #[error("isometry has determinant -1")]
    DetMinusOne,
    #[error("modulus must be positive")]
    BadModulus,
    #[error("isometries act on different lattices")]
    LatticeMismatch,

    #[error("flat components {0} and {1} are not orthogonal")]
    NotOrthogonal(usize, usize),
    #[error("component {component} has restricted inertia {found:?}, expected {expected:?}")]
    WrongInertia {
        component: String,
        expected: (usize, usize, usize),
        found: (usize, usize, usize),
    },
    #[error("flat components do not span the ambient space")]
    NotSpanning,
    #[error("flat needs at least one hyperbolic block")]
    NoBlocks,
    #[error("hyperplane normal must be negative (lambda.lambda < 0)")]
    NonNegativeVector,
    #[error("zero vector")]
    ZeroVector,
    #[error("pair is not in weak general position")]
    NotInGeneralPosition,
    #[error("subspace is not a positive definite {0}-plane")]
    NotPositivePlane(usize),

    #[error("invalid boost parameters: need a^2 - b^2 = 1 and a > b >= 0")]
    InvalidBoost,
    #[error("invalid rotation pair: need c^2 + s^2 = 1 and s < 0")]
    InvalidRotation,
    #[error("invalid arrangement: {0}")]
    InvalidArrangement(String),
    #[error("parameter search exhausted (m <= {max_m}, {t_count} rotation parameters)")]
    SearchExhausted { max_m: u32, t_count: usize },

    #[error("inadmissible v: {0}")]
    InadmissibleV(String),
    #[error("pair is not in S(O(p) x O(q))")]
    NotOrthogonalPair,

    #[error("inner product is not positive definite")]
    NotPositiveDefinite,

    #[error("vector does not have self-pairing -2")]
    NotARoot,

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
