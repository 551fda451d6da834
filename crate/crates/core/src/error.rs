use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An input outside the domain where the quantity is defined.
    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid argument: {0}")]
    Argument(String),

    /// The linear conditions for the skew-symmetric coefficients have no solution.
    #[error("inconsistent construction system (least-squares residual {residual:e})")]
    Inconsistent { residual: f64 },

    #[error("quadrature construction failed: {0}")]
    Quadrature(String),

    /// Newton iteration on the stage equations did not reach the tolerance.
    #[error("stage equations did not converge after {iterations} iterations (residual {residual:e})")]
    StepFailed { iterations: usize, residual: f64 },
}
