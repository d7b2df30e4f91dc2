use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("covariance violated: w b w* not in A for basis element {index} (residual {residual:.3e})")]
    Covariance { index: usize, residual: f64 },

    #[error("subspace is not G-invariant: G_{m} leaves it (residual {residual:.3e})")]
    NotGInvariant { m: i64, residual: f64 },

    #[error("subspace is not contained in the semicrossed product (residual {0:.3e})")]
    NotInSemicrossed(f64),

    #[error("truncation too short: {levels} levels given, at least {required} required")]
    TruncationTooShort { levels: usize, required: usize },

    #[error("unknown point label `{0}`")]
    UnknownPoint(String),

    #[error("function undefined at point `{0}`")]
    FunctionUndefined(String),

    #[error("precondition failed: {0}")]
    Precondition(String),

    #[error("mismatched algebra contexts")]
    ContextMismatch,
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
