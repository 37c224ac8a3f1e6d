use thiserror::Error;

/// Errors raised while validating, solving or analysing a pattern instance.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("alphabet must contain at least one symbol")]
    EmptyAlphabet,
    #[error("symbol label {0:?} is empty or duplicated")]
    BadSymbol(String),
    #[error("unknown symbol {symbol:?} in {context}")]
    UnknownSymbol { symbol: String, context: String },
    #[error("pattern {0:?} is empty")]
    EmptyPattern(String),
    #[error("pattern name {0:?} appears more than once")]
    DuplicatePatternName(String),
    #[error("pattern collection is empty")]
    EmptyCollection,
    #[error("{what}: {detail}")]
    BadDistribution { what: String, detail: String },

    #[error("SubpatternViolation: pattern {inner:?} occurs inside pattern {outer:?}")]
    SubpatternViolation { inner: String, outer: String },
    #[error("ZeroPathViolation: pattern {pattern:?} has a zero transition into position {position}")]
    ZeroPathViolation { pattern: String, position: usize },
    #[error("TauMayBeInfinite: {witness} can be reached but never leads to a pattern")]
    TauMayBeInfinite { witness: String },

    #[error("DivisorZero: internal path probability of pattern {0:?} is zero")]
    DivisorZero(String),
    #[error("NotIID: transition rows differ from the initial distribution")]
    NotIid,
    #[error("ZeroMass: state {0:?} has zero probability")]
    ZeroMass(String),
    #[error("FormulaMismatch: correlation formulas disagree for ({k:?}, {t:?})")]
    FormulaMismatch { k: String, t: String },

    #[error("InvalidZ: evaluation point z = {0} must satisfy z >= 1")]
    InvalidZ(String),
    #[error("SingularAtZ: the pattern system is singular at z = {0}")]
    SingularAtZ(String),
    #[error("WrongShape: pattern {0:?} has length greater than one")]
    WrongShape(String),
    #[error("HeadsDiffer: patterns {0:?} and {1:?} start with different symbols")]
    HeadsDiffer(String, String),
    #[error("NotIrreducible: the transition graph is not strongly connected")]
    NotIrreducible,
    #[error("NeedsUnitZ: stationary restart check needs a solution at z = 1")]
    NeedsUnitZ,
    #[error("TooLargeForSymbolic: symbolic determinant limited to size {limit}, instance has {size}")]
    TooLargeForSymbolic { size: usize, limit: usize },
    #[error("IdentityViolated: generating-function identity failed at z = {0}")]
    IdentityViolated(String),
    #[error("OracleDisagreement: {0}")]
    OracleDisagreement(String),

    #[error("SingularFundamental: I - Q is singular on the reachable transient states")]
    SingularFundamental,
    #[error("StepCapExceeded: trial {trial} ran {cap} steps without a match")]
    StepCapExceeded { trial: u64, cap: u64 },

    #[error("BadSpec: {0}")]
    BadSpec(String),
    #[error("NoCandidates: no admissible response pattern")]
    NoCandidates,

    #[error("{location}: {message}")]
    Parse { location: String, message: String },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
