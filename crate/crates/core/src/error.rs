use thiserror::Error;

/// Errors raised anywhere in the laboratory.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("argument out of domain: {0}")]
    Domain(String),

    #[error("quadrature did not converge within {panels} panels (estimate {estimate:e}, error {error:e})")]
    NonConvergence {
        panels: usize,
        estimate: f64,
        error: f64,
    },

    #[error("integrand is not finite at x = {0:e}")]
    NonFinite(f64),

    #[error("integrand does not decay on the half line")]
    NonDecay,

    #[error("weighted integral diverges: {0}")]
    Divergent(String),

    #[error("zero denominator in Rayleigh quotient")]
    ZeroDenominator,

    #[error("descent step failed: {0}")]
    StepFailure(String),

    #[error("trial family is empty for these parameters: {0}")]
    EmptyFamily(String),

    #[error("cross-check failed: {0}")]
    Mismatch(String),

    #[error("i/o: {0}")]
    Io(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Io(e.to_string())
    }
}
