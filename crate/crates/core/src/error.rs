use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("matrix is not Hermitian: relative residual {residual:.3e} exceeds {tolerance:.1e}")]
    NotHermitian { residual: f64, tolerance: f64 },

    #[error("dimension mismatch: {context} ({left} vs {right})")]
    DimensionMismatch {
        context: &'static str,
        left: usize,
        right: usize,
    },

    #[error("function is undefined at eigenvalue {eigenvalue}")]
    FunctionUndefined { eigenvalue: f64 },

    #[error("eigendecomposition failed to converge")]
    NoConvergence,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid fundamental symmetry: {0}")]
    InvalidSymmetry(String),

    #[error("model is missing {0}")]
    MissingStructure(&'static str),

    #[error("factorization mismatch: relative residual {0:.3e}")]
    FactorizationMismatch(f64),

    #[error("grid too coarse: phase jump {jump:.3} between x = {left} and x = {right}")]
    GridTooCoarse { jump: f64, left: f64, right: f64 },

    #[error("problem too large: dimension {dim} exceeds guard {limit}")]
    TooLarge { dim: usize, limit: usize },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
