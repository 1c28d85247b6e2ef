use thiserror::Error;

use crate::free_group::Word;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("rank mismatch: {0} vs {1}")]
    RankMismatch(usize, usize),
    #[error("rank {0} out of range (must be 1..=26)")]
    BadRank(usize),
    #[error("cannot parse word {input:?}: {reason}")]
    WordSyntax { input: String, reason: String },
    #[error("word {0} is not reduced")]
    NotReduced(String),
    #[error("{0} requires a nonempty word")]
    EmptyWord(&'static str),
    #[error("invalid automorphism: {0}")]
    InvalidAutomorphism(String),
    #[error("automorphism is not positive")]
    NotPositive,
    #[error("no certified cancellation bound: {0}")]
    NoCancellationBound(String),

    #[error("negative value {value} at {word}")]
    NegativeValue { word: Word, value: String },
    #[error("key {word} exceeds depth {depth}")]
    KeyTooLong { word: Word, depth: usize },
    #[error("table is not a current: {0}")]
    NotACurrent(String),
    #[error("zero current")]
    ZeroCurrent,
    #[error("depth {requested} exceeds available depth {available}")]
    DepthOverflow { requested: usize, available: usize },
    #[error("counting window must have odd length, got {0}")]
    EvenWindow(usize),
    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid language: {0}")]
    InvalidLanguage(String),
    #[error("invalid leaf: {0}")]
    InvalidLeaf(String),

    #[error("insufficient input depth {depth}: window around {word} cannot be decided")]
    InsufficientDepth { depth: usize, word: Word },

    #[error("linear program infeasible")]
    Infeasible,
    #[error("linear program unbounded")]
    Unbounded,
    #[error("target {0} not in language")]
    TargetAbsent(Word),

    #[error("matrix is not primitive")]
    NotPrimitive,
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("no prolongable seed letter")]
    NoProlongableSeed,
    #[error("{0}")]
    TooFewIterations(String),
    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("format error: {0}")]
    Format(String),
}

impl Error {
    /// Numeric non-convergence, as opposed to bad input.
    pub fn is_numeric(&self) -> bool {
        matches!(self, Error::NoConvergence { .. })
    }
}
