use thiserror::Error;

/// Errors raised by the MaxRS algorithms and reduction chains.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MaxRsError {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("ball id {0} is already stored")]
    DuplicateId(u64),

    #[error("ball id {0} is not stored")]
    UnknownId(u64),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sequence length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
}

pub type Result<T> = std::result::Result<T, MaxRsError>;

pub(crate) fn invalid(msg: impl Into<String>) -> MaxRsError {
    MaxRsError::InvalidParameter(msg.into())
}

pub(crate) fn precondition(msg: impl Into<String>) -> MaxRsError {
    MaxRsError::Precondition(msg.into())
}
