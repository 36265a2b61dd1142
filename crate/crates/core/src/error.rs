use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension {n} exceeds the dense-table limit {limit}")]
    DimensionTooLarge { n: usize, limit: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("invariant violated: {0}")]
    InvariantViolation(String),
    #[error("budget exceeded: {what} needs {size}, cap is {cap}")]
    BudgetExceeded { what: String, size: u128, cap: u128 },
    #[error("parity mismatch: map ends on parity {left}, next map starts on parity {right}")]
    ParityMismatch { left: usize, right: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid(msg: impl Into<String>) -> Error {
    Error::InvalidParameter(msg.into())
}
