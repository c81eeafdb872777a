use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("normal-phase solution invalid: lambda = {lambda} is not below lambda_c = {lambda_c}")]
    NormalPhaseInvalid { lambda: f64, lambda_c: f64 },

    #[error("eigensolver did not converge after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("Fock cutoff cap {cap} exceeded; last occupations {last:?}")]
    CutoffCapExceeded { cap: usize, last: [f64; 2] },

    #[error("steady state is not unique: {count} eigenvalues within tolerance of zero")]
    DegenerateSteadyState { count: usize },

    #[error("linear solve failed: {0}")]
    LinearSolve(String),

    #[error("basis has no transport-qubit factor")]
    MissingTransportQubit,

    #[error("{0} undefined: {1}")]
    Undefined(&'static str, String),

    #[error("extremum not bracketed: minimum at grid boundary (index {index})")]
    ExtremumNotBracketed { index: usize },

    #[error("insufficient data: need at least {needed} points, got {got}")]
    InsufficientData { needed: usize, got: usize },

    #[error("dense eigensolve guard exceeded: vectorized dimension {dim} > {limit}; use a smaller n_max")]
    DimensionGuard { dim: usize, limit: usize },

    #[error("configuration error in `{key}`: {reason}")]
    Config { key: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn param(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidParameter {
            name,
            reason: reason.into(),
        }
    }
}
