use thiserror::Error;

/// Errors produced by the library.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("{what} did not converge (residual {residual:e})")]
    NumericalFailure { what: &'static str, residual: f64 },

    #[error(
        "descent violated at sweep {sweep}: d decreased by {decrease:e}, required at least {required:e}"
    )]
    DescentViolation {
        sweep: usize,
        decrease: f64,
        required: f64,
    },

    #[error("problem is infeasible: {0}")]
    Infeasible(String),

    #[error("parse error at `{path}`: {message}")]
    Parse { path: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_dim(expected: usize, got: usize) -> Result<()> {
    if expected == got {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, got })
    }
}
