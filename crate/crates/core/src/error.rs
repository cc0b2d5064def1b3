use std::path::PathBuf;

use thiserror::Error;

use crate::graph::VertexId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("batch rejected: {0}")]
    BatchValidation(String),

    #[error("infeasible batch: {0}")]
    InfeasibleBatch(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("iteration out of sequence: expected {expected}, got {got}")]
    Sequencing { expected: u32, got: u32 },

    #[error("state does not match graph: {0}")]
    Consistency(String),

    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),

    #[error("voting enumeration needs {outcomes} outcomes (cap {cap}); use a Monte Carlo estimate instead")]
    EnumerationTooLarge { outcomes: u128, cap: u128 },

    #[error("snapshot {path}: {message}")]
    Snapshot { path: PathBuf, message: String },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
