use thiserror::Error;

/// Errors produced anywhere in the toolkit.
#[derive(Debug, Error)]
pub enum Error {
    /// A configuration or input field failed validation.
    #[error("invalid `{field}`: {message}")]
    Config { field: String, message: String },

    /// The requested problem size exceeds the configured memory budget.
    #[error("capacity exceeded: {qubits} qubits requested, limit is {limit}")]
    Capacity { qubits: usize, limit: usize },

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    Dimension { expected: usize, actual: usize },

    #[error("index {index} out of range for {len} elements")]
    Index { index: usize, len: usize },

    /// Every coupling is zero, so the instance cannot be rescaled.
    #[error("degenerate instance: all couplings are zero")]
    DegenerateInstance,

    #[error("degenerate spectrum: c_max equals c_min ({0})")]
    DegenerateSpectrum(f64),

    #[error("empty {0}")]
    Empty(&'static str),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn config(field: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Config {
            field: field.into(),
            message: message.into(),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
