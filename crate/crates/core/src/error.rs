use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("no lattice point of the requested resolution lies strictly inside the domain")]
    EmptyGrid,
    #[error("scale factor must be positive, got {0}")]
    NonpositiveScale(f64),
    #[error("function has {got} values but the grid has {expected} nodes")]
    GridMismatch { expected: usize, got: usize },
    #[error("Rayleigh quotient of the zero function is undefined")]
    ZeroFunction,
    #[error("operation requires p = 2, got p = {0}")]
    WrongExponent(f64),
    #[error(
        "solver did not converge after {iterations} iterations (best Rayleigh quotient {best})"
    )]
    NoConvergence { iterations: usize, best: f64 },
    #[error("fit window holds {found} eigenvalues, at least {required} are needed")]
    WindowTooSmall { found: usize, required: usize },
    #[error("level {lambda_prime} must exceed the calibration level {lambda0}")]
    OrderViolation { lambda0: f64, lambda_prime: f64 },
    #[error("smaller side {small} exceeds the larger side {large}")]
    SizeOrder { small: f64, large: f64 },
    #[error("upper bound requires sp > N (sp = {sp}, N = {dim})")]
    SubcriticalExponent { sp: f64, dim: usize },
    #[error("inner and outer grids are not nested: {0}")]
    NotNested(String),
    #[error("domain is not a ball")]
    NotABall,
}

pub type Result<T> = std::result::Result<T, Error>;
