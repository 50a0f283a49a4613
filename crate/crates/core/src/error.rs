use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid size for {what}: got {got}, need at least {min}")]
    InvalidSize {
        what: &'static str,
        got: usize,
        min: usize,
    },
    #[error("domain error: {0}")]
    Domain(String),
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("index {index} out of range for {len} entries")]
    IndexOutOfRange { index: usize, len: usize },
    #[error(
        "weight matrix is not strongly connected and aperiodic; no unique stationary distribution"
    )]
    NoUniqueStationary,
    #[error("solver failure: {0}")]
    Solver(String),
    #[error("no candidate profile is consistent with the observed weights")]
    Inconsistent,
    #[error("candidate space of {count} profiles exceeds the enumeration limit {limit}")]
    TooLarge { count: u128, limit: u128 },
    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
