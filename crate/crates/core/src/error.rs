use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("operands live in different graded contexts")]
    ContextMismatch,

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("expected a homogeneous element of degree {expected}, found {found}")]
    DegreeMismatch { expected: u32, found: String },

    #[error("invalid metric: {0}")]
    InvalidMetric(String),

    #[error("a metric is required for this operation")]
    MissingMetric,

    #[error("tensor is not orthogonal: component ({a}, {c}) of NᵀG + GN is {value}")]
    NotOrthogonal { a: usize, c: usize, value: String },

    #[error("quadratic element has coefficients depending on the base coordinates")]
    NonConstantCoefficients,

    #[error("cubic Hamiltonian is not homological")]
    NotHomological,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("matrix is singular")]
    Singular,

    #[error("invalid input: {0}")]
    Invalid(String),
}
