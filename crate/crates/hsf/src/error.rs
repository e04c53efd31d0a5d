//! Runner errors.

use std::path::Path;

/// Errors of the runner.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Invalid or unreadable configuration (the message names the key).
    #[error("configuration: {0}")]
    Config(String),
    /// Filesystem failure.
    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    /// Malformed grid or sidecar file.
    #[error("grid format: {0}")]
    Format(String),
    /// Error from the numerical core.
    #[error(transparent)]
    Core(#[from] hsf_core::error::Error),
    /// A verification command ran but its checks did not hold.
    #[error("check failed: {0}")]
    Check(String),
}

impl Error {
    /// Wrap an I/O error with the path it concerns.
    pub fn io(path: &Path, source: std::io::Error) -> Self {
        Error::Io { path: path.display().to_string(), source }
    }
}

/// Result alias.
pub type Result<T> = std::result::Result<T, Error>;
