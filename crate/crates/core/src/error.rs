use thiserror::Error;

/// Errors raised anywhere in the library.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum McfError {
    /// The point lies on the measure-zero set where the algorithm is undefined
    /// (coordinate ties, a vanishing smallest coordinate, an exactly zero remainder).
    #[error("degenerate point: {0}")]
    DegeneratePoint(String),

    /// A triangle quotient too large for the floating flavor to represent faithfully.
    #[error("partial quotient {0} exceeds the floating-point limit")]
    QuotientOverflow(u64),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("numeric failure: {0}")]
    NumericFailure(String),

    #[error("insufficient samples: {0}")]
    InsufficientSamples(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("internal consistency check failed: {0}")]
    Inconsistent(String),
}

pub type Result<T> = std::result::Result<T, McfError>;
