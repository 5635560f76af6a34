use thiserror::Error;

/// Errors raised by the metric construction and verification routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),

    /// A query fell outside the range covered by a tabulated map.
    #[error("range error: {what} = {value} outside covered range [{lo}, {hi}]")]
    Range {
        what: &'static str,
        value: f64,
        lo: f64,
        hi: f64,
    },

    /// Adaptive quadrature exhausted its interval budget before meeting the tolerance.
    #[error("quadrature did not converge: estimated error {error:.3e} exceeds tolerance {tolerance:.3e} after {intervals} intervals")]
    Quadrature {
        error: f64,
        tolerance: f64,
        intervals: usize,
    },

    /// A metric matrix that should be positive definite was not.
    #[error("metric not positive definite at s = {s}: eigenvalues ({lo:.3e}, {hi:.3e})")]
    Positivity { s: f64, lo: f64, hi: f64 },

    /// Wraps an error raised while evaluating one point of a grid sweep.
    #[error("at grid point {index} (z = {z}, w = {w}): {source}")]
    AtPoint {
        index: usize,
        z: String,
        w: String,
        #[source]
        source: Box<Error>,
    },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
