//! Error type shared by all modules.

use thiserror::Error;

/// Errors raised by construction, analysis, and simulation routines.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension {dim} exceeds the cap {cap} (raise with QPV_DIM_CAP, at most {max})", max = crate::cap::MAX_DIM_CAP)]
    CapExceeded { dim: usize, cap: usize },

    #[error("dimension mismatch: {0}")]
    DimMismatch(String),

    #[error("invalid {what}: {why}")]
    Invalid { what: &'static str, why: String },

    #[error("malformed strategy: {0}")]
    MalformedStrategy(String),

    #[error("degenerate eigenspace: {0}")]
    Degenerate(String),

    #[error("unknown protocol '{0}'")]
    UnknownProtocol(String),

    #[error("process has vanishing trace (no output on any input)")]
    NullProcess,

    #[error("zero success probability: {0}")]
    ZeroSuccess(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(what: &'static str, why: impl Into<String>) -> Self {
        Error::Invalid { what, why: why.into() }
    }

    pub fn mismatch(why: impl Into<String>) -> Self {
        Error::DimMismatch(why.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
