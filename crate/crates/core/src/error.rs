use thiserror::Error;

/// Failure modes shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("x = {x} lies outside the {regime} regime (delta = {delta})")]
    RegimeMismatch {
        regime: &'static str,
        x: f64,
        delta: f64,
    },

    #[error("quadrature failed on [{a}, {b}]: estimated error {error:e} exceeds tolerance {tolerance:e} after {panels} panels")]
    QuadratureFailure {
        a: f64,
        b: f64,
        error: f64,
        tolerance: f64,
        panels: usize,
    },

    #[error("eigensolver did not converge for eigenvalue {index} after {iterations} iterations")]
    EigensolverFailure { index: usize, iterations: usize },

    #[error("invalid configuration: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
