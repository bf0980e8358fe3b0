use thiserror::Error;

use crate::linalg::Ambient;

#[derive(Debug, Error)]
pub enum Error {
    #[error("p = {0} is not a prime in 2..=251")]
    InvalidPrime(u32),

    #[error("ambient mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: Ambient, found: Ambient },

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    /// A desk-scale budget would be exceeded; the caller has to shrink the
    /// instance or raise the limit explicitly.
    #[error("size guard: {what} requires {required}, limit is {limit}")]
    Guard {
        what: &'static str,
        required: u128,
        limit: u128,
    },

    #[error("parse error at byte {offset}: {message}")]
    Parse { offset: usize, message: String },

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn ensure_same(expected: Ambient, found: Ambient) -> Result<()> {
    if expected == found {
        Ok(())
    } else {
        Err(Error::DimensionMismatch { expected, found })
    }
}
