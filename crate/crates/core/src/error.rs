use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("size error: {0}")]
    Size(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),
    #[error("eigensolver did not converge after {sweeps} sweeps (max off-diagonal {off_diagonal:e})")]
    NotConverged { sweeps: usize, off_diagonal: f64 },
    #[error("integration failure: norm drift {drift:e} exceeds {limit:e}")]
    Integration { drift: f64, limit: f64 },
    #[error("squeezing parameter undefined: mean spin {mean_spin:e} below {threshold:e}")]
    UndefinedSqueezing { mean_spin: f64, threshold: f64 },
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// Numeric failures as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NotConverged { .. } | Error::Integration { .. })
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
