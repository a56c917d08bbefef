use thiserror::Error;

/// Errors raised by constructions and checks in this crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u32),
    #[error("extension degree must be at least 1")]
    ZeroDegree,
    #[error("field of order {0} exceeds the supported maximum of 2^20")]
    FieldTooLarge(u64),
    #[error("invalid modulus: {0}")]
    InvalidModulus(String),
    #[error("modulus {0:?} is reducible over F_p")]
    ReducibleModulus(Vec<u32>),
    #[error("element code {code} is out of range for a field of order {q}")]
    InvalidElement { code: u64, q: u64 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("bad arity for {op}: expected {expected} operand(s), got {got}")]
    Arity { op: &'static str, expected: usize, got: usize },
    #[error("{d} does not divide q - 1 = {q_minus_one}")]
    NotADivisor { d: u64, q_minus_one: u64 },
    #[error("cannot parse field spec {0:?}")]
    BadFieldSpec(String),
    #[error("singular matrix")]
    SingularMatrix,
    #[error("points are not pairwise distinct")]
    DuplicatePoints,
    #[error("degree mismatch: expected {expected}, got {got}")]
    DegreeMismatch { expected: usize, got: usize },
    #[error("block size {k} out of range for v = {v}")]
    BlockSizeOutOfRange { k: usize, v: usize },
    #[error("enumeration of {needed} items exceeds cap {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("subspace is not GL2-invariant: {0}")]
    NotInvariant(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("empty family")]
    EmptyFamily,
    #[error("consistency check failed: {0}")]
    CheckFailed(String),
    #[error("malformed input: {0}")]
    Malformed(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
