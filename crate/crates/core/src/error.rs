use thiserror::Error;

/// Errors produced by the evaluation engines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("link {link} has length {distance}, below the minimum distance of 1")]
    LinkTooShort { link: &'static str, distance: f64 },

    #[error("quadrature did not converge: estimate {estimate}, error {error_estimate} after {panels} panels")]
    NonConvergence {
        estimate: f64,
        error_estimate: f64,
        panels: usize,
    },

    #[error("probability {value} outside [0, 1] beyond numeric tolerance")]
    OutOfRange { value: f64 },

    #[error("degenerate channel sample: {0}")]
    DegenerateSample(&'static str),

    #[error("truncation search failed: survival still {survival} at x = {upper}")]
    TruncationSearch { upper: f64, survival: f64 },

    #[error("non-finite intermediate value in {0}")]
    Overflow(&'static str),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
