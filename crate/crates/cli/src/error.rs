use std::path::PathBuf;

use thiserror::Error;
use walklab_core::WalkError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("usage: {0}")]
    Usage(String),
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("capacity: {0}")]
    Capacity(String),
    #[error(transparent)]
    Walk(WalkError),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.into(),
            source,
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io { .. } => 3,
            CliError::Capacity(_) => 4,
            CliError::Walk(WalkError::Capacity { .. }) => 4,
            CliError::Walk(_) => 2,
        }
    }
}

impl From<WalkError> for CliError {
    fn from(e: WalkError) -> Self {
        match e {
            WalkError::Capacity { .. } => CliError::Capacity(e.to_string()),
            other => CliError::Walk(other),
        }
    }
}
