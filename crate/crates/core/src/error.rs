use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument outside the mathematical domain of the operation.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("dense diagonalization supports at most {max} qubits, got {n_qubits}")]
    Capacity { n_qubits: usize, max: usize },

    /// The objective or its gradient produced NaN/inf at `iterate`.
    #[error("non-finite {what} at iterate {iterate:?}")]
    NonFinite { what: &'static str, iterate: Vec<f64> },

    /// Every cross-field problem found while validating a problem or config.
    #[error("invalid configuration: {}", .0.join("; "))]
    Validation(Vec<String>),

    #[error("all {starts} optimizer starts failed; first failure: {first}")]
    AllStartsFailed { starts: usize, first: Box<Error> },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
