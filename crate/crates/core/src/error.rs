use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("matrix is {rows}x{cols}, expected square")]
    NonSquare { rows: usize, cols: usize },
    #[error("matrix is not symmetric (asymmetry {asymmetry:e} exceeds {tolerance:e})")]
    NotSymmetric { asymmetry: f64, tolerance: f64 },
    #[error("rank {k} out of range 1..={max}")]
    RankOutOfRange { k: usize, max: usize },
    #[error("normal equations are singular")]
    SingularSystem,
    #[error("at least two points are required, got {0}")]
    TooFewPoints(usize),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("index {index} out of range for size {bound}")]
    IndexOutOfRange { index: usize, bound: usize },
    #[error("duplicate index {0}")]
    DuplicateIndex(usize),
    #[error("cannot draw {requested} indices from {available} candidates")]
    NotEnoughCandidates { requested: usize, available: usize },
    #[error("cannot form {clusters} clusters from {points} points")]
    TooManyClusters { clusters: usize, points: usize },
    #[error("sampled intersection block is not symmetric (asymmetry {0:e})")]
    InconsistentBlock(f64),
    #[error("refusing to materialize a {n}x{n} matrix (limit {limit})")]
    TooLarge { n: usize, limit: usize },
    #[error("mixture model has no learners")]
    EmptyModel,
    #[error("weights require at least one learner")]
    ZeroLearners,
    #[error("malformed method name {0:?}")]
    MalformedName(String),
    #[error("not enough columns: need {needed}, have {available}")]
    NotEnoughColumns { needed: usize, available: usize },
    #[error("reference matrix has zero norm")]
    ZeroTarget,
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),
}
