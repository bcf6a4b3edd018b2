use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square: {len} entries cannot form an n x n matrix with n = {n}")]
    NotSquare { n: usize, len: usize },

    #[error("non-finite value at position {index}")]
    NonFinite { index: usize },

    #[error("|value| {value} at position {index} exceeds the supported magnitude 2^20")]
    MagnitudeExceeded { index: usize, value: f64 },

    #[error("coordinate {index} = {value} lies outside [0, 1]")]
    OutOfRange { index: usize, value: f64 },

    #[error("entry {index} = {value} is not binary")]
    NotBinary { index: usize, value: f64 },

    #[error("exhaustive enumeration needs n <= {cap}, got n = {n}; use sampling instead")]
    EnumerationCap { n: usize, cap: usize },

    #[error("weights sum to {sum}, which is too close to zero")]
    ZeroWeightSum { sum: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("matrix must be symmetric for this operation (symmetrize first)")]
    NotSymmetric,

    #[error("matrix is not skew-symmetric at ({i}, {j})")]
    NotSkewSymmetric { i: usize, j: usize },

    #[error("representation tagged {tag} violates its structural invariant")]
    TagInvariant { tag: String },

    #[error("weak-sum recovery needs n >= 3, got n = {n}")]
    Underdetermined { n: usize },

    #[error("invalid diagonalizable witness: {0}")]
    InvalidWitness(String),

    #[error("vector violates the constant value property at feasible point {point}: a.x = {value}, expected {expected}")]
    CvpViolation {
        point: String,
        value: f64,
        expected: f64,
    },

    #[error("{0}")]
    InvalidArgument(String),

    #[error("cover system is infeasible: row {row} has no covering column")]
    InfeasibleSystem { row: usize },

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("linear program ended with status {0}")]
    Lp(String),

    #[error("experiment failure: {0}")]
    Experiment(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
