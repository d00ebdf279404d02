use thiserror::Error;

/// Errors surfaced by solvers, checkers, and constructors.
#[derive(Debug, Clone, Error)]
pub enum Error {
    #[error("players {0} and {1} do not form a valid pair")]
    InvalidPair(usize, usize),

    #[error("player index {index} out of range for {n} players")]
    PlayerOutOfRange { index: usize, n: usize },

    #[error("player count {0} outside the supported range 1..=16")]
    PlayerCountOutOfRange(usize),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("size guard: {0}")]
    SizeGuard(String),

    #[error("unsupported action domain: {0}")]
    UnsupportedDomain(String),

    #[error("linear system is singular")]
    SingularSystem,

    #[error("linking incentives are not consistent: witness (i={i}, j={j}, k={k}, l={l})")]
    NotConsistent {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
    },

    #[error("linking incentives are not aligned: witness (i={i}, j={j}, k={k}, l={l})")]
    NotAligned {
        i: usize,
        j: usize,
        k: usize,
        l: usize,
    },

    #[error("lattice precondition failed: {0}")]
    LatticePrecondition(String),

    #[error("best response is not unique: {0}")]
    NonUniqueBestResponse(String),

    #[error("conformity check failed: {0}")]
    ConformityViolated(String),

    #[error("precondition failed: {0}")]
    PreconditionFailed(String),

    #[error("numeric failure: {0}")]
    Numeric(String),
}

pub type Result<T> = std::result::Result<T, Error>;
