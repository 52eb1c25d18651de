use thiserror::Error;

/// Errors raised when an operation's preconditions are not met.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ZenoError {
    #[error("pauli label {0} out of range (expected 0..=3)")]
    InvalidLabel(u8),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("qubit index {index} out of range for a {num_qubits}-qubit register")]
    QubitOutOfRange { index: usize, num_qubits: usize },
    #[error("duplicate target qubit {0}")]
    DuplicateTarget(usize),
    #[error("operator is not hermitian (defect {0:e})")]
    NotHermitian(f64),
    #[error("operator is not unitary (defect {0:e})")]
    NotUnitary(f64),
    #[error("basis is not orthonormal (defect {0:e})")]
    NotOrthonormal(f64),
    #[error("state is not normalized (norm {0})")]
    NotNormalized(f64),
    #[error("system size {n} outside supported range {min}..={max}")]
    SizeOutOfRange { n: usize, min: usize, max: usize },
    #[error("pauli string touches ancilla qubits: {0}")]
    TouchesAncilla(String),
    #[error("{0}")]
    Contract(String),
    #[error("invalid config: {field}: {message}")]
    InvalidConfig { field: String, message: String },
    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T, E = ZenoError> = std::result::Result<T, E>;
