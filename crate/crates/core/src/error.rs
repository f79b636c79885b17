use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("field unsupported: p={p}, m={m}")]
    FieldUnsupported { p: u64, m: u32 },
    #[error("q must be a prime power (got {0})")]
    NotPrimePower(u64),
    #[error("resource budget exceeded: {what} needs {needed}, budget is {budget}")]
    Budget {
        what: &'static str,
        needed: u128,
        budget: u128,
    },
    #[error("insufficient table depth: need degree {needed}, table has {available}")]
    InsufficientDepth { needed: usize, available: usize },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("empty support: P_{k}({n}) has no elements")]
    EmptySupport { k: usize, n: usize },
    #[error("too few samples: {got} < {min}")]
    TooFewSamples { got: usize, min: usize },
    #[error("malformed irreducible cache: {0}")]
    CacheFormat(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn budget(what: &'static str, needed: u128, budget: u128) -> Self {
        Error::Budget {
            what,
            needed,
            budget,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
