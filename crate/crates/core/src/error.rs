use thiserror::Error;

/// Errors raised by the toolkit.
///
/// The variants fall into three families that the CLI maps onto exit codes:
/// configuration problems, bad input data, and numerical failures.
#[derive(Debug, Error)]
pub enum CurError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("class {class:?} has no observed value in column {column}")]
    UnrecoverableGap { class: String, column: usize },

    #[error("mu = {mu} does not exceed the convergence bound {bound}")]
    MuBound { mu: f64, bound: f64 },

    #[error("target count {target} unreachable; nearest achieved count is {achieved}")]
    CountUnreachable { target: usize, achieved: usize },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl CurError {
    /// Coarse classification used for process exit codes.
    pub fn kind(&self) -> ErrorKind {
        match self {
            CurError::Config(_) => ErrorKind::Config,
            CurError::Parse { .. }
            | CurError::InvalidInput(_)
            | CurError::ShapeMismatch(_)
            | CurError::UnrecoverableGap { .. }
            | CurError::Io(_) => ErrorKind::Data,
            CurError::MuBound { .. } | CurError::CountUnreachable { .. } | CurError::Numerical(_) => {
                ErrorKind::Numerical
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    Config,
    Data,
    Numerical,
}

pub type Result<T, E = CurError> = std::result::Result<T, E>;
