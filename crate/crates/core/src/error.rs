use thiserror::Error;

/// Everything that can go wrong in this crate.
///
/// `Inconsistent` is reserved for states that contradict a theorem (an exact
/// division with remainder, a resultant that is not an `n`-th power, two rules
/// with opposite verdicts). Seeing it means there is a bug.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("work budget exhausted after {spent} units (limit {limit}) in {what}")]
    Budget { what: String, spent: u64, limit: u64 },
    #[error("arithmetic inconsistency: {0}")]
    Inconsistent(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}

pub(crate) fn inconsistent<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Inconsistent(msg.into()))
}
