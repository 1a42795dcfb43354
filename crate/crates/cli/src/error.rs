use std::path::Path;

use gvi_core::GviError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] GviError),
}

impl CliError {
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        CliError::Io {
            path: path.display().to_string(),
            source,
        }
    }
}

/// Process exit status, the only machine-readable contract of the binary.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    /// Converged, or every check passed.
    Success = 0,
    /// Configuration or input error.
    Config = 1,
    /// The run finished without converging, or a check failed.
    NotConverged = 2,
}

impl Exit {
    pub fn code(self) -> i32 {
        self as i32
    }

    pub fn from_outcome(ok: bool) -> Self {
        if ok {
            Exit::Success
        } else {
            Exit::NotConverged
        }
    }
}
