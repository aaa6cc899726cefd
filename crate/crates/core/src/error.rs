use thiserror::Error;

/// Errors produced by the numerical routines of this crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// An argument lies outside the domain of the function.
    #[error("domain error in {func}: {msg}")]
    Domain { func: &'static str, msg: String },

    /// A computation produced a non-finite value or failed to converge.
    #[error("numerical failure in {func}: {msg}")]
    Numeric { func: &'static str, msg: String },

    /// A bracketing root finder could not locate a sign change.
    #[error("no bracket found in {func}: {msg}")]
    NoBracket { func: &'static str, msg: String },

    /// An internal consistency check failed.
    #[error("internal consistency failure in {func}: {msg}")]
    Internal { func: &'static str, msg: String },

    /// Table cache I/O or (de)serialization failed.
    #[error("cache error: {0}")]
    Cache(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Domain {
        func,
        msg: msg.into(),
    }
}

pub(crate) fn numeric(func: &'static str, msg: impl Into<String>) -> Error {
    Error::Numeric {
        func,
        msg: msg.into(),
    }
}

/// Rejects negative or non-finite arguments.
pub(crate) fn check_nonneg(func: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x >= 0.0 {
        Ok(())
    } else {
        Err(domain(func, format!("argument must be finite and >= 0, got {x}")))
    }
}

/// Rejects non-positive or non-finite arguments.
pub(crate) fn check_pos(func: &'static str, x: f64) -> Result<()> {
    if x.is_finite() && x > 0.0 {
        Ok(())
    } else {
        Err(domain(func, format!("argument must be finite and > 0, got {x}")))
    }
}
