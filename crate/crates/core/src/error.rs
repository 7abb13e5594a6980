use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("singular matrix: rank {rank} < dimension {dim}")]
    SingularMatrix { rank: usize, dim: usize },

    #[error("affine system infeasible: rank(coeffs) = {rank_coeffs}, rank([coeffs|rhs]) = {rank_augmented}")]
    Infeasible {
        rank_coeffs: usize,
        rank_augmented: usize,
    },

    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("multiplication table is not a group: {0}")]
    NotAGroup(String),

    #[error("no primitive {n}-th root of unity available: {reason}")]
    BadRoot { n: usize, reason: String },

    #[error("antipode is not invertible; negative powers are undefined")]
    NonInvertibleAntipode,

    #[error("modules live on different sides or over different Hopf data")]
    MixedSides,

    #[error("map is not convolution invertible: its operator image is singular")]
    NotConvInvertible,

    #[error("sampling exhausted after {attempts} redraws of cell {cell}")]
    SamplingExhausted { cell: String, attempts: usize },

    #[error("cell {0} is singular; the recursion step cannot be taken")]
    CellSingular(String),

    #[error("budget of {0} multiplications exhausted before the slice span stabilized")]
    BudgetExhausted(usize),

    #[error("instance too large for exhaustive enumeration: {0}")]
    TooLarge(String),

    #[error("generation {requested} exceeds witness depth {depth}")]
    DepthExceeded { requested: usize, depth: usize },

    #[error("evaluation leaves the materialized block range: {0}")]
    TruncationExceeded(String),

    #[error("invalid block layout: {0}")]
    InvalidLayout(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
