use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{what} out of domain: {value}")]
    Domain { what: &'static str, value: f64 },

    #[error("derivative order {0} is not supported (1..=4)")]
    UnsupportedOrder(u32),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("potential is singular at lattice point {index}; enable softening or cell averaging")]
    Singularity { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    Dimension { expected: usize, got: usize },

    #[error("numeric failure: {0}")]
    Numeric(String),

    #[error("state space dimension {dim} exceeds cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("assembled operator is not Hermitian (defect {defect:e})")]
    NonHermitian { defect: f64 },

    #[error("empty input: {0}")]
    Empty(&'static str),

    #[error("lattice consistency check failed: {0}")]
    Consistency(String),

    #[error("hypothesis check failed: {0}")]
    Hypothesis(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
