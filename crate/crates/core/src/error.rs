use thiserror::Error;

/// Errors raised by the laboratory's operations.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// Malformed or out-of-range input.
    #[error("invalid input: {0}")]
    Input(String),

    /// An operation was called on an argument violating its precondition.
    #[error("precondition failed: {0}")]
    Precondition(String),

    /// The requested (system, observable, quality) combination is not supported.
    #[error("unsupported combination: {0}")]
    Capability(String),

    /// Correlation data does not contain every lag a computation needs.
    #[error("missing lags: {0:?}")]
    MissingLags(Vec<i64>),

    /// A sequence proxy for an operator limit failed to stabilise.
    #[error("limit along `{scheme}` did not converge (residual {residual:.3e})")]
    NotConverged { scheme: String, residual: f64 },

    /// A numerical routine could not certify its own postcondition.
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn input<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Input(msg.into()))
}
