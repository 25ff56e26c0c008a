use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid skeleton layout: {0}")]
    Layout(String),

    #[error("invalid pose: {0}")]
    Pose(String),

    #[error("layout mismatch: detector uses `{expected}`, pose uses `{found}`")]
    LayoutMismatch { expected: String, found: String },

    #[error("unknown skeleton layout `{0}`")]
    UnknownLayout(String),

    #[error("invalid detector: {0}")]
    Detector(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("not enough frames: need {needed}, have {available}")]
    NotEnoughFrames { needed: usize, available: usize },

    #[error("feature dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("invalid training data: {0}")]
    Training(String),

    #[error("unknown class label {0}")]
    UnknownLabel(u32),

    #[error("{0}")]
    Parse(#[from] ParseError),

    #[error("invalid document: {0}")]
    Document(String),

    #[error("invalid split: {0}")]
    Split(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

/// Parse failure in a skeleton text file, with the 1-based line it refers to.
#[derive(Debug, Clone, PartialEq, Error)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

impl ParseError {
    pub fn new(line: usize, message: impl Into<String>) -> Self {
        Self {
            line,
            message: message.into(),
        }
    }
}
