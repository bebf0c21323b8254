use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("sieve limit {0} outside supported range [2, 10^9]")]
    SieveLimit(u64),

    #[error("query x = {x} exceeds prime table limit {limit}")]
    OutOfTable { x: f64, limit: u64 },

    #[error("scale X = {x} too small: {reason}")]
    ScaleTooSmall { x: f64, reason: String },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("quadrature failed: {0}")]
    Quadrature(String),

    #[error("sample budget exceeded: need {need} samples, budget {budget}; lower X or loosen the step/tail targets")]
    BudgetExceeded { need: u64, budget: u64 },

    #[error("sieve cache: {0}")]
    Cache(String),

    #[error("ratio expression: {0}")]
    RatioParse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
