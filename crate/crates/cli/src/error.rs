use std::path::PathBuf;

use crate::config::ConfigError;
use crate::state_spec::SpecError;

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_NUMERIC: i32 = 2;
pub const EXIT_VERIFY: i32 = 3;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Spec(#[from] SpecError),
    #[error("{path}: {source}")]
    Config { path: PathBuf, source: ConfigError },
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    /// Invalid input files are usage errors; numeric failures are not.
    #[error("{path}: {source}")]
    Input {
        path: PathBuf,
        source: freemoments::Error,
    },
    #[error("{context}: {source}")]
    Numeric {
        context: String,
        source: freemoments::Error,
    },
    #[error("verification failed: {0}")]
    Verify(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) | CliError::Spec(_) | CliError::Config { .. } | CliError::Io { .. } | CliError::Input { .. } => {
                EXIT_USAGE
            }
            CliError::Numeric { .. } => EXIT_NUMERIC,
            CliError::Verify(_) => EXIT_VERIFY,
        }
    }
}

/// Attaches context to library errors.
pub trait Context<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError>;
}

impl<T> Context<T> for freemoments::Result<T> {
    fn context(self, what: impl FnOnce() -> String) -> Result<T, CliError> {
        self.map_err(|source| CliError::Numeric { context: what(), source })
    }
}
