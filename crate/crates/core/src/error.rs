use std::path::PathBuf;

/// Errors produced by every stage of the pipeline.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    /// Malformed text or binary input. `line` is 1-based; column details,
    /// when known, are folded into `detail`.
    #[error("parse error at line {line}: {detail}")]
    Parse { line: usize, detail: String },

    #[error("input is empty")]
    EmptyInput,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("row {row} has zero norm; cosine dissimilarity is undefined")]
    ZeroNormRow { row: usize },

    #[error("size mismatch: expected {expected}, got {actual}")]
    SizeMismatch { expected: usize, actual: usize },

    #[error("vertex {index} is isolated (zero affinity degree)")]
    IsolatedVertex { index: usize },

    #[error("non-finite value encountered at iteration {iteration}")]
    NonFinite { iteration: usize },

    #[error("{what} did not converge")]
    NoConvergence { what: &'static str },

    #[error("bad config: {0}")]
    Config(String),

    #[error("stage {stage} failed: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn in_stage(self, stage: &'static str) -> Error {
        Error::Stage { stage, source: Box::new(self) }
    }

    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Error {
        Error::Io { path: path.into(), source }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
