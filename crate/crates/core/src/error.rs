use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("order mismatch: expected order {expected}, got {found}")]
    OrderMismatch { expected: usize, found: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("invalid bipartition: {0}")]
    InvalidBipartition(String),

    #[error("{what} = {value} out of range ({range})")]
    OutOfRange {
        what: &'static str,
        value: String,
        range: String,
    },

    #[error("non-finite value encountered: {0}")]
    NonFinite(String),

    #[error("size cap exceeded: {what} needs {requested}, cap is {cap}")]
    SizeCap {
        what: &'static str,
        requested: u128,
        cap: u128,
    },

    #[error("invalid structure: {0}")]
    Structure(String),

    #[error("invalid graph: {0}")]
    Graph(String),

    #[error("parse error at {position}: expected {expected}, found {found}")]
    Parse {
        position: usize,
        expected: String,
        found: String,
    },

    #[error("unknown identifier `{name}` at {position}")]
    UnknownIdentifier { name: String, position: usize },

    #[error("invalid assumption: {0}")]
    Assumption(String),

    #[error("malformed tensor file {path}: {reason}")]
    Format { path: PathBuf, reason: String },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn out_of_range(
        what: &'static str,
        value: impl ToString,
        range: impl ToString,
    ) -> Self {
        Error::OutOfRange {
            what,
            value: value.to_string(),
            range: range.to_string(),
        }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by exceeding a configured resource cap.
    pub fn is_resource_cap(&self) -> bool {
        matches!(self, Error::SizeCap { .. })
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. } | Error::Format { .. })
    }
}
