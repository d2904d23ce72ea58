use choquet_core::ChoquetError;
use thiserror::Error;

/// Failure of a command, classified by the exit code it maps to.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Parse(String),
    #[error("{0}")]
    Validation(String),
    #[error("{0}")]
    Inconsistent(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Io { .. } | CliError::Parse(_) => 1,
            CliError::Validation(_) => 2,
            CliError::Inconsistent(_) => 3,
        }
    }
}

impl From<ChoquetError> for CliError {
    fn from(err: ChoquetError) -> Self {
        use ChoquetError::*;
        match err {
            BoundViolation(_)
            | ZeroTrace(_)
            | MaximalityViolation { .. }
            | ConsistencyFailure { .. }
            | InconsistentSystem { .. } => CliError::Inconsistent(err.to_string()),
            _ => CliError::Validation(err.to_string()),
        }
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
