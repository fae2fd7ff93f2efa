use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("grid mismatch: {0}")]
    GridMismatch(String),
    #[error("Nehari projection impossible: {0}")]
    NoProjection(String),
    #[error("dilation path unbounded above")]
    Unbounded,
    #[error("regime error: {0}")]
    Regime(String),
    #[error("bracket failure: {0}")]
    Bracket(String),
    #[error("insufficient data: {0}")]
    InsufficientData(String),
    #[error("allocation of {0} kernel entries refused")]
    Memory(usize),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidParameter(msg.into()))
}
