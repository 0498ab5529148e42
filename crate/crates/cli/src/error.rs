use std::fmt;

/// Failure of a CLI run, carrying the process exit code.
#[derive(Debug)]
pub enum CliError {
    /// Invalid or inconsistent configuration; `line` is 1-based when known.
    Config { line: Option<usize>, message: String },
    /// Solver breakdown, non-convergence or an SPD violation.
    Numerical(iga_lumping::Error),
    Io(String),
}

impl CliError {
    pub fn config(line: Option<usize>, message: impl Into<String>) -> Self {
        CliError::Config { line, message: message.into() }
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config { .. } => 2,
            CliError::Numerical(_) => 3,
            CliError::Io(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Config { line: Some(l), message } => write!(f, "config error at line {l}: {message}"),
            CliError::Config { line: None, message } => write!(f, "config error: {message}"),
            CliError::Numerical(e) => write!(f, "numerical failure: {e}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

impl From<iga_lumping::Error> for CliError {
    /// Parameter errors map to configuration failures, solver errors to numerical ones.
    fn from(e: iga_lumping::Error) -> Self {
        use iga_lumping::Error as E;
        match e {
            E::Io(m) => CliError::Io(m),
            E::InvalidDegree(_)
            | E::OutOfRange { .. }
            | E::IndexOutOfRange { .. }
            | E::InvalidRank { .. }
            | E::InvalidArgument(_)
            | E::Parse { .. }
            | E::MissingStructure(_)
            | E::NonconformingInterface(_)
            | E::LengthMismatch { .. }
            | E::InconsistentMaps(_)
            | E::EmptySystem => CliError::Config { line: None, message: e.to_string() },
            E::DomainViolation(_)
            | E::SingularJacobian { .. }
            | E::NonpositiveDiagonal { .. }
            | E::NotPositiveDefinite { .. }
            | E::IndefiniteSchur
            | E::SingularPerturbation(_)
            | E::NoConvergence { .. }
            | E::UnconvergedEigendata(_) => CliError::Numerical(e),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = std::result::Result<T, CliError>;
