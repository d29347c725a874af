use thiserror::Error;

/// Errors produced by the numerical and sampling layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("series did not converge after {terms} terms (partial sum {partial}, tail bound {bound})")]
    Truncation { partial: f64, bound: f64, terms: usize },

    /// The value is too large for f64; `log_value` carries its natural log.
    #[error("overflow: log of value is {log_value}")]
    Overflow { log_value: f64 },

    #[error("quadrature did not reach tolerance (estimate {estimate}, error {error})")]
    Quadrature { estimate: f64, error: f64 },

    #[error("sampler gave up after {iterations} iterations")]
    SamplerFailure { iterations: usize },

    #[error("order {r} exceeds the supported limit {max}")]
    OrderLimit { r: usize, max: usize },

    #[error("fit rejected: {0}")]
    FitQuality(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
