use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Errors raised by the model.
///
/// Variants are grouped by cause so that front ends can map them to stable
/// exit codes: bad arguments, physically invalid operating points, and model
/// results that fall outside their admissible range.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument `{name}`: {reason}")]
    InvalidArgument { name: &'static str, reason: String },

    #[error("state is not normalized: squared norm {norm_sqr}")]
    NotNormalized { norm_sqr: f64 },

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("invalid environment overlap: {0}")]
    InvalidOverlap(String),

    #[error("physically invalid operating point: {0}")]
    PhysicalValidity(String),

    #[error("{what} = {raw} lies outside its admissible range {range}")]
    OutOfRange {
        what: &'static str,
        raw: f64,
        range: &'static str,
    },
}

impl Error {
    pub(crate) fn arg(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument {
            name,
            reason: reason.into(),
        }
    }
}

/// Fails with [`Error::InvalidArgument`] unless `value` is finite and strictly positive.
pub(crate) fn require_positive(name: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::arg(name, format!("must be finite and > 0, got {value}")))
    }
}
