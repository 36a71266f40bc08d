use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument is outside the region where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    /// An iterative evaluation did not reach its tolerance.
    #[error("numeric failure: {0}")]
    NumericFailure(String),

    /// A file allocation or cache placement violates the problem constraints.
    #[error("infeasible caching design: {0}")]
    Infeasible(String),

    /// A search space is too large to enumerate.
    #[error("search space too large: {0}")]
    TooLarge(String),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
