use thiserror::Error;

/// Errors produced by the channel, lattice, sumset, multilevel and bound routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("at least {min} users required, found {found}")]
    TooFewUsers { min: usize, found: usize },

    #[error("entry ({row}, {col}) is not rational")]
    NotRational { row: usize, col: usize },

    #[error("entry ({row}, {col}) is not an integer")]
    NotInteger { row: usize, col: usize },

    #[error("entry ({row}, {col}) is zero")]
    ZeroEntry { row: usize, col: usize },

    #[error("matrix is not fully connected")]
    NotFullyConnected,

    #[error("diagonal scaling entries must be positive (index {index})")]
    NonPositiveScaling { index: usize },

    #[error("noise variance for user {user} must be positive")]
    NonPositiveVariance { user: usize },

    #[error("value is rational, an irrational quadratic number is required")]
    RationalValue,

    #[error("invalid quadratic irrational: {0}")]
    InvalidQuadratic(String),

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("epsilon must lie in (0, 1/4), got {0}")]
    EpsilonOutOfRange(f64),

    #[error("power must be positive and finite, got {0}")]
    InvalidPower(f64),

    #[error("trial count must be at least 1")]
    ZeroTrials,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("user triple ({0}, {1}, {2}) is invalid for this matrix")]
    InvalidTriple(usize, usize, usize),

    #[error("pair is not contained in the parent sets")]
    InvalidPair,

    #[error("empty set where a nonempty set is required")]
    EmptySet,

    #[error("hypothesis violated: {0}")]
    HypothesisViolated(String),

    #[error("search exhausted without a certificate: {0}")]
    SearchExhausted(String),

    #[error("digit {digit} at level {level} is outside the alphabet of user {user}")]
    DigitOutsideAlphabet { user: usize, level: usize, digit: i64 },

    #[error("received value {0} is outside the decodable range")]
    OutOfRange(i64),

    #[error("received value {y} is not divisible by the direct gain {p}")]
    NotDivisible { y: i64, p: i64 },

    #[error("received digit {0} has no preimage in the decoding table")]
    UndecodableDigit(i64),

    #[error("enumeration of {0} tuples exceeds the guard")]
    EnumerationGuard(u128),

    #[error("at least two points with distinct powers are required")]
    InsufficientPoints,

    #[error("duplicate power value {0}")]
    DuplicatePower(f64),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
}

pub type Result<T> = std::result::Result<T, Error>;
