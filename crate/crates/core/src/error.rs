use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("valuation of zero is undefined")]
    ZeroValuation,
    #[error("{0} out of range")]
    OutOfRange(String),
    #[error("series diverges: {0}")]
    Divergent(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("singular matrix")]
    Singular,
    #[error("invalid input: {0}")]
    InvalidInput(String),
    /// A computed identity failed. Always a bug, never a property of valid input.
    #[error("internal consistency failure: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;
