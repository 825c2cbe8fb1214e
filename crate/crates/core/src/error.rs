use thiserror::Error;

/// Errors raised by state construction, operators and protocol execution.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid state: {0}")]
    InvalidState(String),

    #[error("dimension mismatch: expected {expected}, got {actual}")]
    DimensionMismatch { expected: usize, actual: usize },

    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },

    #[error("register of {requested} qubits exceeds the cap of {cap}")]
    TooManyQubits { requested: usize, cap: usize },

    #[error("operator is not unitary (max deviation {0:.3e})")]
    NotUnitary(f64),

    #[error("usage error: {0}")]
    Usage(String),

    #[error("locality violation: {0}")]
    Locality(String),

    #[error("branch {0} has zero probability")]
    BranchImpossible(String),

    #[error("unsupported state: {0}")]
    UnsupportedState(String),

    #[error("verification failed: {0}")]
    Verification(String),
}

pub type Result<T> = std::result::Result<T, Error>;
