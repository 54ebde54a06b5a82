use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid beta {0}: expected 1, 2 or 4")]
    InvalidBeta(u32),
    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),
    #[error("nonpositive effective index {0}")]
    NonPositiveIndex(f64),
    #[error("argument {value} outside the supported range [{lo}, {hi}]")]
    OutOfRange { value: f64, lo: f64, hi: f64 },
    #[error("index {index} out of range (max {max})")]
    IndexOutOfRange { index: usize, max: usize },
    #[error("jet order {have} insufficient, need at least {need}")]
    JetOrder { have: usize, need: usize },
    #[error("sqrt(xi) jet requested at the non-analytic point xi = 0")]
    SqrtAtZero,
    #[error("derivative self-validation failed at order {order}: discrepancy {discrepancy:e} exceeds {tolerance:e}")]
    DerivativeValidation {
        order: usize,
        discrepancy: f64,
        tolerance: f64,
    },
    #[error("Newton iteration did not converge (residual {residual:e} after {iterations} steps)")]
    NewtonDivergence { residual: f64, iterations: usize },
    #[error("tail estimate failed: {0}")]
    TailEstimate(String),
    #[error("window coverage: {0}")]
    WindowCoverage(String),
    #[error("quadrature cutoff failure: estimated tail mass {0:e}")]
    Cutoff(f64),
    #[error("linear system infeasible: {0}")]
    Infeasible(String),
    #[error("linear system has a non-unique solution ({0} free unknowns)")]
    NonUnique(usize),
    #[error("degree bound {0} exceeded")]
    DegreeBound(u32),
    #[error("coefficient table: {0}")]
    Table(String),
    #[error("missing coefficient entry beta={beta} j={j} k={k}")]
    MissingEntry { beta: u32, j: u32, k: u32 },
    #[error("ladder of length {have} too short for j_max={j_max}")]
    LadderTooShort { have: usize, j_max: usize },
    #[error("rational reconstruction residual {residual:e} above tolerance {tolerance:e}")]
    Reconstruction { residual: f64, tolerance: f64 },
    #[error("io: {0}")]
    Io(String),
    #[error("format: {0}")]
    Format(String),
    #[error("input: {0}")]
    Input(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
