//! Run manifests and the text formats read and written by the command line.

pub mod manifest;
pub mod number;
pub mod tables;
pub mod unitary;

use thiserror::Error;

/// Failure while reading, validating or writing files.
#[derive(Debug, Error)]
pub enum IoError {
    /// The document does not match its schema (bad keys, values or layout).
    #[error("{path}:{line}: {message}")]
    Schema {
        path: String,
        line: usize,
        message: String,
    },
    #[error("{path}: {source}")]
    File {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error(transparent)]
    Core(#[from] crate::Error),
}

impl IoError {
    pub(crate) fn schema(path: &str, line: usize, message: impl Into<String>) -> Self {
        IoError::Schema {
            path: path.to_string(),
            line,
            message: message.into(),
        }
    }

    pub(crate) fn file(path: &std::path::Path, source: std::io::Error) -> Self {
        IoError::File {
            path: path.display().to_string(),
            source,
        }
    }
}

pub(crate) fn read_to_string(path: &std::path::Path) -> Result<String, IoError> {
    std::fs::read_to_string(path).map_err(|e| IoError::file(path, e))
}

pub(crate) fn write_string(path: &std::path::Path, text: &str) -> Result<(), IoError> {
    std::fs::write(path, text).map_err(|e| IoError::file(path, e))
}
