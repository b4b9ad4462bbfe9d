use alloc::string::String;

/// Errors raised by the numerical core.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// Caller violated a precondition (bad dimension, empty grid, `δ ≥ Δ`, ...).
    #[error("usage error: {0}")]
    Usage(String),
    /// A point lies outside the domain where a function is defined.
    #[error("domain error: {0}")]
    Domain(String),
    /// Newton inversion did not reach the requested residual.
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    Convergence { iterations: usize, residual: f64 },
}

pub type Result<T> = core::result::Result<T, Error>;

pub(crate) fn usage(msg: impl Into<String>) -> Error {
    Error::Usage(msg.into())
}

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
