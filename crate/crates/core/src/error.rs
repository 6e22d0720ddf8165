use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by precondition and validation checks.
///
/// `Internal` is reserved for situations the mathematics rules out (a Hall
/// failure under equal line sums, an infeasible lifting LP under checked
/// hypotheses); hitting it means an implementation bug, not bad input.
#[derive(Debug, Error, PartialEq, Eq)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("index out of range: {0}")]
    IndexOutOfRange(String),
    #[error("not a partition: {0}")]
    InvalidPartition(String),
    #[error("margin precondition violated: {0}")]
    MarginMismatch(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn dims(msg: impl Into<String>) -> Self {
        Error::DimensionMismatch(msg.into())
    }

    pub fn index(msg: impl Into<String>) -> Self {
        Error::IndexOutOfRange(msg.into())
    }

    pub fn partition(msg: impl Into<String>) -> Self {
        Error::InvalidPartition(msg.into())
    }

    pub fn margin(msg: impl Into<String>) -> Self {
        Error::MarginMismatch(msg.into())
    }

    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn internal(msg: impl Into<String>) -> Self {
        Error::Internal(msg.into())
    }
}
