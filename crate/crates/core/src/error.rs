use thiserror::Error;

/// Errors raised by the library. Variants map onto the failure classes the CLI
/// reports through its exit codes.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("no prime found in ({lo}, {hi}) with residue {a} mod {m}")]
    NotFound { lo: String, hi: String, a: String, m: String },

    #[error("search exhausted at step {step}: {reason}")]
    SearchExhausted { step: usize, reason: String },

    #[error("root iteration did not certify at tolerance {tol:e}")]
    NonConvergence { tol: f64 },

    #[error("precision failure: {0}")]
    PrecisionFailure(String),

    #[error("syntax error at offset {offset}: {message}")]
    Syntax { offset: usize, message: String },

    #[error("exponent {exponent} of x{var} is out of range (must be < {bound})")]
    ExponentOutOfRange { var: usize, exponent: u64, bound: u32 },

    #[error("unknown variable {0}")]
    UnknownVariable(String),

    #[error("element is zero")]
    ZeroElement,

    #[error("point tuple is zero")]
    ZeroTuple,

    #[error("degree is indeterminate at this tolerance: {0}")]
    Indeterminate(String),

    #[error("degree {degree} is too large (limit {limit})")]
    DegreeTooLarge { degree: usize, limit: usize },

    #[error("element does not involve the top generator x{0}")]
    NotInTopGenerator(usize),

    #[error("invalid tower step: {0}")]
    InvalidStep(String),

    #[error("tower has no steps")]
    EmptyTower,

    #[error("enumeration of {count} elements exceeds the cap of {cap}")]
    TooLarge { count: String, cap: u64 },

    #[error("enumeration is empty")]
    EmptyStream,

    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("malformed certificate: {0}")]
    MalformedCertificate(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn invalid<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::InvalidInput(msg.into()))
}
