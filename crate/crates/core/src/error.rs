use thiserror::Error;

/// Errors shared by all modules of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("argument must be positive, got {0}")]
    NonPositive(i128),
    #[error("argument must be nonzero")]
    ZeroArgument,
    #[error("discriminant must be negative, got {0}")]
    NotNegative(i64),
    #[error("discriminant {0} is not congruent to 0 or 1 mod 4")]
    InvalidResidue(i64),
    #[error("spf table limit {limit} too small, required at least {required}")]
    TableTooSmall { limit: u64, required: u64 },
    #[error("invalid quadratic form ({a},{b},{c}): {reason}")]
    InvalidForm {
        a: i64,
        b: i64,
        c: i64,
        reason: &'static str,
    },
    #[error("point is not in the fundamental domain")]
    OutsideFundamentalDomain,
    #[error("boundary comparison undecidable at precision {0} bits")]
    UndecidableBoundary(u32),
    #[error("distance comparison undecidable at precision {0} bits")]
    UndecidableDistance(u32),
    #[error("precision escalation exhausted after {0} doublings")]
    PrecisionExhausted(u32),
    #[error("alpha is a root of the class polynomial: x = alpha has zero norm")]
    ZeroNorm,
    #[error("the two discriminants are equal")]
    SameDiscriminant,
    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),
    #[error("epsilon must lie in (0, 1/2)")]
    EpsilonOutOfRange,
    #[error("cache miss")]
    CacheMiss,
    #[error("corrupt cache entry: {0}")]
    CacheCorrupt(String),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
