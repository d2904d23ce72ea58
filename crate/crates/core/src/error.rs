use thiserror::Error;

use crate::subset::Subset;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum ChoquetError {
    #[error("matrix is not Hermitian: max |M - M†| = {deviation:e}")]
    NonHermitianInput { deviation: f64 },

    #[error("matrix has non-finite entries")]
    NonFinite,

    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("size mismatch: expected n = {expected}, got {found}")]
    SizeMismatch { expected: usize, found: usize },

    #[error("not a square matrix: {rows}x{cols}")]
    NotSquare { rows: usize, cols: usize },

    #[error("not a density matrix: {0}")]
    NotDensityMatrix(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("index {index} outside 1..={n}")]
    IndexOutOfRange { index: usize, n: usize },

    #[error("exhaustive subset enumeration refused for n = {n} (limit {max})")]
    SubsetLimitExceeded { n: usize, max: usize },

    #[error("invalid capacity: {0}")]
    InvalidCapacity(String),

    #[error("function values must be finite and non-negative (index {index}: {value})")]
    NegativeValue { index: usize, value: f64 },

    #[error("invalid probability p({index}) = {value}")]
    InvalidProbability { index: usize, value: f64 },

    #[error("invalid reference set: {0}")]
    InvalidReferenceSet(String),

    #[error("vector {index} has norm {norm}, too far from 1 to normalize")]
    NotNormalized { index: usize, norm: f64 },

    #[error("degenerate reference set: vectors {subset} are linearly dependent (smallest singular value {singular_value:e})")]
    DegenerateSet { subset: Subset, singular_value: f64 },

    #[error("Gram matrix of {subset} is numerically singular (smallest singular value {singular_value:e})")]
    SingularGram { subset: Subset, singular_value: f64 },

    #[error("bound violated: {0}")]
    BoundViolation(String),

    #[error("trace {0:e} too small to normalize")]
    ZeroTrace(f64),

    #[error("maximality violated: P[{top}] = {top_value} < P[{index}] = {value}")]
    MaximalityViolation {
        top: usize,
        top_value: f64,
        index: usize,
        value: f64,
    },

    #[error("internal consistency check failed: {what} (residual {residual:e})")]
    ConsistencyFailure { what: &'static str, residual: f64 },

    #[error("inconsistent linear system: least-squares residual {residual:e}")]
    InconsistentSystem { residual: f64 },

    #[error("inputs lie in different comonotone classes")]
    DifferentClass,

    #[error("boundary input: probabilities contain ties")]
    BoundaryInput,

    #[error("class count overflows for n = {0}")]
    Overflow(usize),

    #[error("unknown tolerance profile `{0}`")]
    UnknownProfile(String),
}

pub type Result<T, E = ChoquetError> = std::result::Result<T, E>;
