use thiserror::Error;

/// Errors produced by the correlation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A requested size exceeds a configured memory or work ceiling.
    #[error("sizing: {0}")]
    Sizing(String),

    /// An argument lies outside the range covered by precomputed tables.
    #[error("out of range: {0}")]
    OutOfRange(String),

    /// Malformed input (unsorted points, bad box, zero parameters, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// Adaptive quadrature could not meet its tolerance.
    #[error("quadrature did not converge: residual bound {residual:e} exceeds tolerance {tol:e}")]
    NonConvergence { residual: f64, tol: f64 },

    /// An audit found a value outside its tolerance.
    #[error("check failed: {0}")]
    CheckFailed(String),

    #[error("i/o: {0}")]
    Io(String),
}

impl Error {
    /// Short machine-readable tag.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::Sizing(_) => "sizing",
            Error::OutOfRange(_) => "out_of_range",
            Error::InvalidInput(_) => "invalid_input",
            Error::NonConvergence { .. } => "non_convergence",
            Error::CheckFailed(_) => "check_failed",
            Error::Io(_) => "io",
        }
    }

    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidInput(_) => 2,
            Error::Sizing(_) => 3,
            Error::OutOfRange(_) => 4,
            Error::NonConvergence { .. } => 5,
            Error::CheckFailed(_) => 6,
            Error::Io(_) => 7,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
