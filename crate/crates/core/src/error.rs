use thiserror::Error;

/// Errors surfaced by the library. The CLI maps every variant except
/// [`Error::Internal`] to exit code 2.
#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime below 2^32")]
    NotPrime(u64),

    #[error("{value} is not invertible modulo {modulus}")]
    NotInvertible { value: u64, modulus: u64 },

    #[error("modulus mismatch: expected {expected}, got {got}")]
    ModulusMismatch { expected: u64, got: u64 },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("line {line}: key {key} is outside the irregular set of p = {p}")]
    KeyOutsideIrregular { line: usize, p: u32, key: String },

    #[error("line {line}: value {value} is not reduced modulo {p}")]
    ValueOutOfRange { line: usize, p: u32, value: u64 },

    #[error("prime mismatch: {0}")]
    PrimeMismatch(String),

    #[error("brute-force packing refused: |I| = {0} exceeds 20")]
    TooLarge(usize),

    #[error("internal consistency failure: {0}")]
    Internal(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
