use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square")]
    NotSquare,
    #[error("matrix is not symmetric")]
    NotSymmetric,
    #[error("diagonal entry {0} is odd")]
    OddDiagonal(usize),
    #[error("matrix is not positive definite")]
    NotPositiveDefinite,
    #[error("matrix is singular modulo {0}")]
    Singular(u64),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("degree mismatch: {0} vs {1}")]
    DegreeMismatch(usize, usize),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("unsupported parameter: {0}")]
    Unsupported(String),
    #[error("{0} is not an odd prime")]
    NotOddPrime(u64),
    #[error("input is not p-integral (valuation {0})")]
    NotPIntegral(i64),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("insufficient trace bound: need {need}, have {have}")]
    InsufficientBound { need: u64, have: u64 },
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
