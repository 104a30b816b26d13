use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("qubit count {requested} outside supported range 1..={max}")]
    Capacity { requested: usize, max: usize },

    #[error("qubit index {index} invalid for a {n_qubits}-qubit register")]
    QubitIndex { index: usize, n_qubits: usize },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("feature map {0} has no gate-level circuit")]
    UnsupportedFamily(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("degenerate training set: {0}")]
    DegenerateTraining(String),

    #[error("degenerate split: {0}")]
    DegenerateSplit(String),

    #[error("metric undefined: {0}")]
    UndefinedMetric(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("{path}: {message}")]
    Data { path: PathBuf, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
