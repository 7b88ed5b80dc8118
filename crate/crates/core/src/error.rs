use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("amplitude count {0} is not a power of two")]
    NotPowerOfTwo(usize),
    #[error("zero vector cannot be normalized")]
    ZeroVector,
    #[error("state norm {0} is not within 1e-9 of 1")]
    NotNormalized(f64),
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },
    #[error("invalid bipartition: {0}")]
    BadCut(String),
    #[error("qubit index {index} out of range for {n_qubits} qubits")]
    QubitOutOfRange { index: usize, n_qubits: usize },
    #[error("invalid mixture weights: {0}")]
    BadWeights(String),
    #[error("operator is not Hermitian (deviation {0:e})")]
    NotHermitian(f64),
    #[error("matrix is not unitary (deviation {0:e})")]
    NotUnitary(f64),
    #[error("invalid label: {0}")]
    BadLabel(String),
    #[error("invalid W-class parameters: {0}")]
    BadParams(String),
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("no verified cloning circuit found for {0}")]
    NoCircuitFound(String),
    #[error("inconsistent verdict: {0}")]
    InconsistentVerdict(String),
    #[error("structure mismatch: {0}")]
    StructureMismatch(String),
    #[error("parameters are the W point; no insufficiency certificate exists")]
    WStatePoint,
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
