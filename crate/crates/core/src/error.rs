use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
    #[error("bad magic tag: expected {expected:?}, found {found:?}")]
    BadMagic { expected: String, found: String },
    #[error("truncated payload: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("dimension error: {0}")]
    Dimension(String),
    #[error("shape error: {0}")]
    Shape(String),
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("invalid key: {0}")]
    Key(String),
    #[error("inconsistent packing metadata: {0}")]
    Metadata(String),
    #[error("image error: {0}")]
    Image(String),
    #[error("unsupported channel layout: {0}")]
    UnsupportedChannels(String),
    #[error("non-finite value in {0}")]
    NonFinite(String),
    #[error("column {0} has no observed entries")]
    MissingColumn(usize),
    #[error("no convergence after {iterations} iterations")]
    NoConvergence { iterations: usize },
    #[error("empty input: {0}")]
    Empty(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for failures of the numerics themselves rather than of the data
    /// handed to them.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NonFinite(_) | Error::NoConvergence { .. })
    }
}
