use thiserror::Error;

/// Errors raised by the library.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid channel: {0}")]
    InvalidChannel(String),

    #[error("invalid codeword: {0}")]
    InvalidCodeword(String),

    #[error("invalid power constraints: {0}")]
    InvalidConstraints(String),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("enumeration budget exceeded: {states} states > budget {budget}")]
    BudgetExceeded { states: u128, budget: u128 },

    #[error("no crossing found below cap {cap}")]
    NotFound { cap: f64 },

    #[error("invalid code family: {0}")]
    InvalidFamily(String),
}

pub type Result<T> = std::result::Result<T, Error>;
