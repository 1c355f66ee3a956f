use thiserror::Error;

/// Errors surfaced by the library.
#[derive(Debug, Error)]
pub enum LevyError {
    #[error("stability index must lie in (0, 2), got {0}")]
    AlphaOutOfRange(f64),

    #[error("invalid jump measure: {0}")]
    InvalidMeasure(String),

    #[error("invalid stability index function: {0}")]
    InvalidStabilityIndex(String),

    #[error("invalid test function: {0}")]
    InvalidTestFn(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("frequency-domain truncation insufficient: {0}")]
    Truncation(String),

    #[error("approximation schedule failed: {0}")]
    Schedule(String),

    #[error("invalid input: {0}")]
    InvalidInput(String),

    #[error("simulation produced non-finite state at path {path}, step {step}")]
    NonFiniteState { path: usize, step: usize },

    #[error("invalid simulation configuration: {0}")]
    InvalidConfig(String),

    #[error("interpolation budget exceeded: {0}")]
    InterpolationBudget(String),

    #[error("diagnostic failed: {0}")]
    Diagnostic(String),

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, LevyError>;
