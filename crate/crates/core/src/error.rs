use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An argument lies outside the mathematical domain of an operation.
    #[error("domain error: {0}")]
    Domain(String),
    /// Caller broke a structural precondition (shape, symmetry, ordering).
    #[error("contract violation: {0}")]
    Contract(String),
    /// Input data is malformed or non-finite.
    #[error("invalid data: {0}")]
    Data(String),
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }

    pub(crate) fn contract(msg: impl Into<String>) -> Self {
        Error::Contract(msg.into())
    }
}

/// Prefixes a domain error with the offending eigenvalue index.
pub(crate) fn at_index(i: usize) -> impl Fn(Error) -> Error {
    move |e| match e {
        Error::Domain(msg) => Error::Domain(format!("eigenvalue {i}: {msg}")),
        other => other,
    }
}
