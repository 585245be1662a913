use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("matrix is singular")]
    Singular,

    #[error("matrix is not skew-symmetric")]
    NotSkew,

    #[error("pfaffian needs even size, got {0}")]
    OddSize(usize),

    #[error("index out of range: {0}")]
    Index(String),

    #[error("invalid signature ({p},{q}): need p >= q >= 1")]
    Signature { p: usize, q: usize },

    #[error("malformed root set: {0}")]
    MalformedTheta(String),

    #[error("root set {theta} is not self-opposite in SO({p},{q})")]
    NotSelfOpposite { p: usize, q: usize, theta: String },

    #[error("subspace is not isotropic")]
    NotIsotropic,

    #[error("vectors are linearly dependent")]
    Dependent,

    #[error("matrix is not in the unipotent chart: {0}")]
    NotUnipotent(String),

    #[error("flag not transverse at levels {0:?}")]
    NotTransverse(Vec<String>),

    #[error("pivot vanished at stage {stage}, level {level}")]
    PivotVanished { stage: usize, level: usize },

    #[error("not alterable at window ({i},{j})")]
    NotAlterable { i: usize, j: usize },

    #[error("unsupported regime: {0}")]
    Unsupported(String),

    #[error("sign data vanishes: {0}")]
    Degenerate(String),

    #[error("perturbation did not stabilise after {0} attempts")]
    Unstable(usize),

    #[error("inconsistent result: {0}")]
    Inconsistent(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("sampling budget exhausted")]
    Budget,
}

pub type Result<T> = std::result::Result<T, Error>;
