use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no sign change on [{lo}, {hi}]")]
    NoSignChange { lo: f64, hi: f64 },
    #[error("non-finite function value at x = {0}")]
    NonFinite(f64),
    #[error("no convergence after {iterations} iterations (residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },
    #[error("singular jacobian (condition estimate {0:e})")]
    SingularJacobian(f64),
    #[error("V0 is not an exceptional depth (|sin| residual {0:e})")]
    NotExceptional(f64),
    #[error("breit-wigner fit failed: {0}")]
    FitFailed(String),
    #[error("no invertible intertwiner (best smallest singular value {0:e})")]
    NoInvertibleIntertwiner(f64),
    #[error("wavefunction leaks through the grid boundary (|psi| = {0:e})")]
    BoundaryLeak(f64),
}

pub type Result<T> = std::result::Result<T, Error>;
