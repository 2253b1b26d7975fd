//! Error type shared across the crate.

use std::path::PathBuf;

/// All failure modes of the library surface.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("qubit index {qubit} out of range for {n_qubits}-qubit state")]
    QubitIndex { qubit: usize, n_qubits: usize },

    #[error("invalid gate: {0}")]
    InvalidGate(String),

    #[error("shape mismatch in {what}: expected {expected}, got {actual}")]
    Shape {
        what: &'static str,
        expected: usize,
        actual: usize,
    },

    #[error("capacity exceeded: {needed} weights requested but only {available} basis states")]
    Capacity { needed: usize, available: usize },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("data error: {0}")]
    Data(String),

    #[error("schema error: {0}")]
    Schema(String),

    #[error("config error: {0}")]
    Config(String),

    #[error("checkpoint error: {0}")]
    Checkpoint(String),

    #[error("training diverged at epoch {epoch}: loss = {loss}")]
    Divergence { epoch: usize, loss: f64 },

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

pub type Result<T> = std::result::Result<T, Error>;
