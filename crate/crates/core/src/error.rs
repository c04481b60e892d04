use num_complex::Complex64;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("received signal power is zero; SNR is undefined")]
    ZeroSignal,

    #[error("covariance matrix is singular; use a positive diagonal loading")]
    SingularCovariance,

    #[error("spectrum is all zero; nothing to refine")]
    EmptySpectrum,

    #[error("peak-to-ripple ratio undefined: {0}")]
    UndefinedPrr(String),

    #[error(transparent)]
    Solver(#[from] SolverError),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }

    /// Stable identifier used in machine-readable error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidArgument { .. } => "invalid_argument",
            Error::Dimension(_) => "dimension",
            Error::ZeroSignal => "zero_signal",
            Error::SingularCovariance => "singular_covariance",
            Error::EmptySpectrum => "empty_spectrum",
            Error::UndefinedPrr(_) => "undefined_prr",
            Error::Solver(_) => "solver",
            Error::Config(_) => "config",
            Error::Io(_) => "io",
            Error::Csv(_) => "csv",
        }
    }
}

/// Failure of the Dantzig-selector solver. Carries the best iterate seen so
/// callers can still inspect or report it.
#[derive(Debug, Clone, Error)]
#[error(
    "solver did not converge after {iterations} iterations \
     (primal residual {primal_residual:.3e}, dual residual {dual_residual:.3e}, gap {gap:.3e})"
)]
pub struct SolverError {
    pub iterations: usize,
    pub primal_residual: f64,
    pub dual_residual: f64,
    pub gap: f64,
    pub constraint_violation: f64,
    pub best: Vec<Complex64>,
}
