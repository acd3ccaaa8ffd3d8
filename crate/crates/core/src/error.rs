use std::io;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("line {line}: value is not strictly greater than the previous one")]
    Monotonicity { line: usize },

    #[error("line {line}: {message}")]
    Format { line: usize, message: String },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("zero scan incomplete between t={from} and t={to}: expected {expected} zeros, found {found}")]
    IncompleteScan {
        from: f64,
        to: f64,
        expected: usize,
        found: usize,
    },

    #[error("offset n={n} requires more than {len} zeros")]
    OffsetTooLarge { n: usize, len: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("need at least {needed} points, got {got}")]
    InsufficientPoints { needed: usize, got: usize },

    #[error(
        "moments (skewness={skewness}, kurtosis={kurtosis}) violate kurtosis > 1 + skewness^2"
    )]
    InfeasibleMoments { skewness: f64, kurtosis: f64 },

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error(transparent)]
    Io(#[from] io::Error),
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
