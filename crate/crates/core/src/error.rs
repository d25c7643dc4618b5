use std::io;
use std::path::PathBuf;

/// Errors produced by the pipeline crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// Underlying I/O failure while reading or writing a file.
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: io::Error,
    },

    /// The file exists but its contents do not match the expected format.
    #[error("{path}: {reason}")]
    Format { path: PathBuf, reason: String },

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input dimensions do not satisfy an operation's requirements.
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    /// The call itself is malformed (e.g. an RGB image saved as PGM).
    #[error("{0}")]
    Usage(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn format(path: impl Into<PathBuf>, reason: impl Into<String>) -> Self {
        Error::Format {
            path: path.into(),
            reason: reason.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
