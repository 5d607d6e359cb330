use alloc::string::String;

use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("element {element} is outside the ground set of size {size}")]
    ElementOutOfRange { element: usize, size: usize },

    #[error("configuration has {got} elements, expected {expected}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("ground set of {size} elements exceeds the enumeration cap of {cap}; use Monte Carlo or raise the cap")]
    CapExceeded { size: usize, cap: usize },

    #[error("event is not increasing: configuration {lower} is in the event but {upper} is not")]
    NotIncreasing { lower: String, upper: String },

    #[error("{0}")]
    Domain(String),

    #[error("lattice of {requested} vertices exceeds the size limit of {limit}")]
    SizeLimit { requested: usize, limit: usize },

    #[error("ratio undefined: {0}")]
    Undefined(&'static str),
}

impl Error {
    pub(crate) fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}
