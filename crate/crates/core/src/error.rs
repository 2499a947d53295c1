use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field size q = {q}: {reason}")]
    InvalidField { q: u64, reason: &'static str },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("gcd of two zero polynomials is undefined")]
    ZeroGcd,

    #[error("modulus must have degree at least 1")]
    ConstantModulus,

    #[error("polynomial must be nonconstant")]
    ConstantPolynomial,

    #[error("the zero polynomial has no factorization")]
    ZeroPolynomial,

    #[error("polynomial {0} is not irreducible")]
    Reducible(String),

    #[error("conductor {0} must have odd degree")]
    EvenDegree(String),

    #[error("cannot parse polynomial {text:?}: {reason}")]
    Parse { text: String, reason: String },

    #[error("degree must be at least {min}, got {got}")]
    DegreeTooSmall { min: usize, got: usize },

    #[error("k must be a positive even integer, got {0}")]
    InvalidMomentOrder(u32),

    #[error("{what} needs {needed} entries, budget is {budget}")]
    BudgetExceeded {
        what: &'static str,
        needed: u128,
        budget: u128,
    },

    #[error("{0} is a perfect square; the character-sum bound does not apply")]
    SquareArgument(String),

    #[error("root finder did not converge after {iterations} iterations")]
    RootFinding { iterations: usize },

    #[error("internal invariant violated: {0}")]
    Internal(String),

    #[error("unknown {kind} strategy {name:?}; available: {available}")]
    UnknownStrategy {
        kind: &'static str,
        name: String,
        available: String,
    },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("cache file {path}: {reason}")]
    CacheFormat { path: PathBuf, reason: String },

    #[error("{context}: {source}")]
    Io {
        context: String,
        #[source]
        source: std::io::Error,
    },

    #[error("csv output: {0}")]
    Csv(#[from] csv::Error),

    #[error("json output: {0}")]
    Json(#[from] serde_json::Error),

    #[error("verification failed: {0}")]
    CheckFailed(String),
}

impl Error {
    pub(crate) fn io(context: impl Into<String>, source: std::io::Error) -> Self {
        Error::Io {
            context: context.into(),
            source,
        }
    }

    /// Process exit code: 1 = failed check, 2 = bad configuration or input,
    /// 3 = I/O.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::CheckFailed(_) => 1,
            Error::Io { .. } | Error::Csv(_) | Error::Json(_) | Error::CacheFormat { .. } => 3,
            Error::Internal(_) | Error::RootFinding { .. } => 1,
            _ => 2,
        }
    }
}
