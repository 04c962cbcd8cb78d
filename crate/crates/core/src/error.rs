use thiserror::Error;

/// Errors produced by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unphysical covariance matrix: {0}")]
    Unphysical(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("singular Sigma_s matrix (det = {0:e})")]
    SingularSigma(f64),

    #[error("parameter recovery failed: residual {residual:e} exceeds {tol:e}")]
    Solver { residual: f64, tol: f64 },

    #[error("covariance matrix deviates from the two-mode squeezed thermal normal form by {0:e}")]
    Form(f64),

    #[error("truncated probability mass {mass:e} exceeds tolerance {tol:e}; raise the Fock cutoff")]
    Truncation { mass: f64, tol: f64 },

    #[error("threshold energy exceeds N_max = {0}")]
    NoThreshold(f64),

    #[error("Hilbert space dimension {dim} exceeds the configured cap {cap}")]
    CapExceeded { dim: usize, cap: usize },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain(msg: impl Into<String>) -> Error {
    Error::Domain(msg.into())
}
