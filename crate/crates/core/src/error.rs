use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The scattering denominator vanished at a point where the analytic
    /// decoupling limit does not apply.
    #[error("scattering denominator |D| = {magnitude:e} below pole guard at delta = {delta}")]
    Pole { delta: f64, magnitude: f64 },

    /// An argument outside the domain of a formula.
    #[error("domain error: {0}")]
    Domain(String),

    /// The boundary-matching system is numerically singular.
    #[error("linear system singular (1-norm condition estimate {condition:e}) at delta = {delta}: {params}")]
    SingularSystem {
        condition: f64,
        delta: f64,
        params: String,
    },

    /// A derived quantity disagrees with its closed form.
    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("line {line}: key `{key}`: {message}")]
    Parse {
        line: usize,
        key: String,
        message: String,
    },

    #[error("line {line}: key `{key}`: value out of range: {message}")]
    Range {
        line: usize,
        key: String,
        message: String,
    },
}

pub type Result<T> = std::result::Result<T, Error>;
