use thiserror::Error;

use crate::topology::ValidationReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("qubit id {qubit} is not valid for a C_{grid_size} graph ({count} qubits)")]
    InvalidQubit {
        qubit: usize,
        grid_size: usize,
        count: usize,
    },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("size limit exceeded: {0}")]
    SizeLimit(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("invalid embedding: {0}")]
    InvalidEmbedding(ValidationReport),

    #[error("invalid code: {0}")]
    InvalidCode(String),

    #[error("schedule row {row}: {reason}")]
    Schedule { row: usize, reason: String },

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("input format: {0}")]
    Format(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }
}
