use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    /// No finite number of sub-channels can carry the payload (zero SNR).
    #[error("infeasible: {0}")]
    Infeasible(String),
    #[error("annotator budget exceeded: clusters need {needed}, only {available} available")]
    BudgetExceeded { needed: usize, available: usize },
    #[error("precondition violated: {0}")]
    PreconditionViolated(String),
    /// Brute-force oracles refuse instances beyond their size guard.
    #[error("instance too large for exhaustive search: {0}")]
    TooLarge(String),
}

pub type Result<T> = std::result::Result<T, Error>;
