use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("homeostatic gain is singular at r = {radius} (beta = {beta}, denominator {denominator:e})")]
    GainSingularity {
        radius: f64,
        beta: f64,
        denominator: f64,
    },

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("finite-difference Jacobian entry ({row}, {col}) is not finite")]
    NonFiniteJacobian { row: usize, col: usize },

    #[error("state became non-finite at t = {time}")]
    NonFiniteState { time: f64 },

    #[error("eigenvalue iteration did not converge after {iterations} iterations ({found} of {dim} eigenvalues found)")]
    NoConvergence {
        iterations: usize,
        found: usize,
        dim: usize,
    },

    #[error("sequence length mismatch: {what} has {found} entries, expected {expected}")]
    LengthMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },

    #[error("reentry gain is zero: critical norm is unbounded")]
    GammaZero,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("invalid configuration: {0}")]
    ConfigInvalid(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    /// Stable machine-readable name used in CLI error reports.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::GainSingularity { .. } => "GainSingularity",
            Error::DimensionMismatch { .. } => "DimensionMismatch",
            Error::NonFiniteJacobian { .. } => "NonFiniteJacobian",
            Error::NonFiniteState { .. } => "NonFiniteState",
            Error::NoConvergence { .. } => "NoConvergence",
            Error::LengthMismatch { .. } => "LengthMismatch",
            Error::GammaZero => "GammaZero",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::ConfigInvalid(_) => "ConfigInvalid",
            Error::Io(_) => "IoError",
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub(crate) fn check_dim(expected: usize, found: usize) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
