use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("degenerate parameter: {0}")]
    DegenerateParameter(String),

    #[error("spectral argument must be nonzero")]
    ZeroArgument,

    #[error("enumeration too large: {edges} internal edges exceeds the limit of {limit}")]
    TooLarge { edges: usize, limit: usize },

    #[error("division by a vanishing omega factor")]
    OmegaZero,

    #[error("degenerate sample: {0}")]
    DegenerateSample(String),

    #[error("prime-field backends disagree: {0}")]
    BackendMismatch(String),

    #[error("kernel dimension is {dim}, expected 1")]
    NonUniqueSolution { dim: usize },

    #[error("normalization failed: {0}")]
    NormalizationFailure(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
