use thiserror::Error;

/// Errors raised by channel evaluation, distortion search, design and simulation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A model parameter violates its type invariant.
    #[error("invalid parameter `{field}` = {value}: {constraint}")]
    InvalidParameter {
        field: &'static str,
        value: f64,
        constraint: &'static str,
    },

    /// An operation was evaluated outside its mathematical domain.
    #[error("{operation}: {reason} (got {value})")]
    Domain {
        operation: &'static str,
        reason: &'static str,
        value: f64,
    },

    /// A sampled curve produced a non-finite value during a grid search.
    #[error("non-finite value {value} at omega = {omega} rad/s")]
    Evaluation { omega: f64, value: f64 },

    /// A simulation configuration cannot be run.
    #[error("simulation configuration: {0}")]
    Config(String),

    /// No frequency band in the search range satisfies the distortion predicate.
    #[error("no clean band found in [{lo}, {hi}] rad/s")]
    NoCleanBand { lo: f64, hi: f64 },

    #[error("csv output: {0}")]
    Csv(String),
}

impl Error {
    /// True for errors caused by bad inputs rather than by a failed computation.
    pub fn is_config(&self) -> bool {
        matches!(self, Error::InvalidParameter { .. } | Error::Config(_))
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Csv(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn positive(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            constraint: "must be finite and > 0",
        })
    }
}

pub(crate) fn non_negative(field: &'static str, value: f64) -> Result<f64> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(Error::InvalidParameter {
            field,
            value,
            constraint: "must be finite and >= 0",
        })
    }
}
