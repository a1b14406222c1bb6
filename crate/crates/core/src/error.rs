use std::path::PathBuf;

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter violates its stated range (M = 0, τ² > 1, ρ ≤ 0, ...).
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// A closed form was evaluated outside its domain (negative radicand, ξ = 0, τ² = 1).
    #[error("domain error: {0}")]
    Domain(String),

    #[error("regularized Gram matrix is singular (xi = {xi})")]
    SingularSystem { xi: f64 },

    /// Ĥ = 0, so γ = 0 and the precoder is undefined. Happens at τ² = 1.
    #[error("degenerate CSIT estimate: the channel estimate is identically zero")]
    DegenerateEstimate,

    #[error("user index {index} out of range for {users} users")]
    IndexOutOfRange { index: usize, users: usize },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("no cubic root in ({lo}, {hi}); roots: {roots:?}")]
    NoRootInRange { lo: f64, hi: f64, roots: Vec<f64> },

    #[error("empty search range: {0}")]
    EmptyRange(String),

    #[error("empty codebook")]
    EmptyCodebook,

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{context}: {message}")]
    Parse { context: String, message: String },
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidParameter(msg.into())
    }

    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    /// True for errors that come from evaluating a formula or factorization
    /// rather than from bad input or the file system.
    pub fn is_numeric(&self) -> bool {
        matches!(
            self,
            Error::Domain(_)
                | Error::SingularSystem { .. }
                | Error::DegenerateEstimate
                | Error::NoRootInRange { .. }
        )
    }

    pub fn is_io(&self) -> bool {
        matches!(self, Error::Io { .. })
    }
}
