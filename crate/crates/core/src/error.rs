use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("dimension mismatch: {left} vs {right}")]
    Dimension { left: usize, right: usize },
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("resource bound exceeded: {0}")]
    Resource(String),
    #[error("validation failed: {0}")]
    Validation(String),
    #[error("decode error: {0}")]
    Decode(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn arg<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Argument(msg.into()))
}
