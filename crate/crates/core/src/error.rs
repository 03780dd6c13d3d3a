use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("description index {index} out of range for K = {k}")]
    InvalidIndex { index: usize, k: usize },

    #[error("constraint violated: {0}")]
    ConstraintViolation(String),

    #[error("value outside the quantizer domain: {0}")]
    Domain(f64),

    /// The side-index combination is not in the image of the labeling function.
    #[error("coordinates {0:?} do not form a codeword")]
    NotACodeword(Vec<i64>),

    #[error("kappa = {kappa} out of range for K = {k}")]
    KappaOutOfRange { kappa: usize, k: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
