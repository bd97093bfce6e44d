use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// An operation that only makes sense over the rationals met a float algebra.
    #[error("{0}")]
    RequiresExact(&'static str),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("invalid algebra: {0}")]
    InvalidAlgebra(String),

    #[error("unknown algebra `{0}`")]
    UnknownAlgebra(String),

    #[error("algebra `{name}` needs parameter `{param}`")]
    MissingParameter { name: String, param: String },

    #[error("parameter out of domain for `{name}`: {detail}")]
    ParameterOutOfDomain { name: String, detail: String },

    #[error("subspace columns are linearly dependent (rank {rank} < {cols})")]
    DependentBasis { rank: usize, cols: usize },

    #[error("subspace is not an ideal: [X{i}, {column}] leaves it")]
    NotAnIdeal { i: usize, column: usize },

    #[error("subspace is not abelian")]
    NotAbelian,

    #[error("module action violates the representation property at ({i}, {j})")]
    RepresentationViolation { i: usize, j: usize },

    #[error("component {index} has degree {degree}; quadratic lifts allow at most 2")]
    DegreeTooHigh { index: usize, degree: u32 },

    #[error("component {index} is not an invariant polynomial")]
    NotInvariant { index: usize },

    #[error("expected {expected} lift components, found {found}")]
    ComponentCount { expected: usize, found: usize },

    #[error("orbit sampling exhausted {attempts} attempts inside radius {radius}")]
    SamplingExhausted { attempts: usize, radius: f64 },

    #[error("LP solver failure: {0}")]
    Lp(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
