use thiserror::Error;

/// Errors shared across the crate.
///
/// `SizeLimit` is kept separate from `Validation` because callers (the CLI in
/// particular) map them to different exit codes.
#[derive(Debug, Error)]
pub enum Error {
    #[error("validation error: {0}")]
    Validation(String),
    #[error("size limit exceeded: {0}")]
    SizeLimit(String),
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("empty set not allowed: {0}")]
    EmptySet(String),
    #[error("graph is not connected")]
    Disconnected,
    #[error("singular parameter: {0}")]
    SingularParameter(String),
    #[error("no second representation exists: {0}")]
    NoSecondRepresentation(String),
    #[error("linear system is inconsistent: {0}")]
    InfeasibleLinearSystem(String),
    #[error("pivot limit exceeded after {0} pivots")]
    PivotLimit(usize),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn validation(msg: impl Into<String>) -> Self {
        Error::Validation(msg.into())
    }

    pub fn size_limit(msg: impl Into<String>) -> Self {
        Error::SizeLimit(msg.into())
    }

    pub fn dimension(msg: impl Into<String>) -> Self {
        Error::Dimension(msg.into())
    }
}
