use thiserror::Error;

/// Crate-wide error type. Budget exhaustion is kept distinct from wrong
/// input so callers can map it to an "inconclusive" outcome.
#[derive(Debug, Clone, Error, PartialEq, Eq)]
pub enum Error {
    #[error("ring context mismatch: {0}")]
    ContextMismatch(String),
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("budget exceeded: {0}")]
    Budget(String),
    #[error("truncation overflow: {0}")]
    Truncation(String),
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn is_budget(&self) -> bool {
        matches!(self, Error::Budget(_))
    }
}
