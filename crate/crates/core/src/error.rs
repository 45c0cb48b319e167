use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("modulus must be at least 2 (got {0})")]
    InvalidModulus(u128),

    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("{value} is not invertible modulo {modulus}")]
    NonInvertible { value: u128, modulus: u128 },

    #[error("batch element at index {index} is divisible by {modulus}")]
    BatchNonInvertible { index: usize, modulus: u64 },

    #[error("base {base} is not coprime to {p}")]
    NonCoprime { base: u64, p: u64 },

    #[error("prime {p} is outside the domain of this computation: {reason}")]
    InapplicablePrime { p: u64, reason: &'static str },

    #[error("no closed-form congruence for N = {n}; supported N: 2, 3, 4, 5, 6, 8, 10, 12, 24")]
    UnsupportedFormula { n: u32 },

    #[error("index {index} is out of range for prime {p}")]
    IndexOutOfRange { index: u64, p: u64 },

    #[error("invalid argument: {0}")]
    InvalidArgument(&'static str),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(&'static str),

    #[error("internal consistency failure: {0}")]
    InternalConsistency(String),

    #[error("checkpoint config digest {found} does not match current config {expected}; refusing to resume")]
    RefuseResume { expected: String, found: String },

    #[error("failed to parse {path} at line {line}: {reason}")]
    FileParse {
        path: String,
        line: usize,
        reason: String,
    },

    #[error("i/o error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }
}
