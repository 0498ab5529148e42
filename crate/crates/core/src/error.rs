use thiserror::Error;

/// Errors raised by the discretization, lumping and solver layers.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid degree/smoothness: {0}")]
    InvalidDegree(String),

    #[error("value {value} outside of [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },

    #[error("domain violation: {0}")]
    DomainViolation(String),

    #[error("singular jacobian (|det J| = {det:e}) at parametric point {point:?}")]
    SingularJacobian { det: f64, point: Vec<f64> },

    #[error("nonconforming interface: {0}")]
    NonconformingInterface(String),

    #[error("empty system: every element is outside the trimmed region")]
    EmptySystem,

    #[error("nonpositive diagonal entry {value:e} at row {row}")]
    NonpositiveDiagonal { row: usize, value: f64 },

    #[error("matrix carries no hierarchical structure usable here: {0}")]
    MissingStructure(String),

    #[error("index {index} out of range 1..={max}")]
    IndexOutOfRange { index: usize, max: usize },

    #[error("inconsistent local-to-global maps: {0}")]
    InconsistentMaps(String),

    #[error("matrix is not positive definite (pivot {pivot:e} at row {row})")]
    NotPositiveDefinite { row: usize, pivot: f64 },

    #[error("indefinite Schur complement")]
    IndefiniteSchur,

    #[error("singular low-rank perturbation entry at position {0}")]
    SingularPerturbation(usize),

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("eigensolver did not converge: {converged} of {wanted} pairs after {restarts} restarts")]
    NoConvergence {
        converged: usize,
        wanted: usize,
        restarts: usize,
    },

    #[error("invalid deflation rank {rank} for dimension {dim}")]
    InvalidRank { rank: usize, dim: usize },

    #[error("eigendata rejected: {0}")]
    UnconvergedEigendata(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("i/o error: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
