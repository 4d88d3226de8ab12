use thiserror::Error;

/// Errors raised by the numerical substrate, models, imputers and combining rules.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("matrix is not positive definite (pivot {pivot})")]
    Factorization { pivot: usize },
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("degenerate data: {0}")]
    DegenerateData(String),
    #[error("optimizer did not converge after {iterations} iterations")]
    NoConvergence { iterations: usize, last: Vec<f64> },
    #[error("singular covariance")]
    SingularCovariance,
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    /// The data do not meet a method's or imputer's requirements.
    #[error("incompatible: {0}")]
    Incompatible(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidArgument(msg.into()))
}
