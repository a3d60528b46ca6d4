use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("steady state did not converge after {iterations} iterations (residual {last_residual:e})")]
    NonConvergence { iterations: usize, last_residual: f64 },
    #[error("drive design outside its validity regime: {0}")]
    RegimeViolation(String),
    #[error("linearized dynamics are unstable (stability margin {margin:e})")]
    Unstable { margin: f64 },
    #[error("eigensolver failed to converge")]
    EigSolverFailure,
    #[error("M - i*omega*I is numerically singular at omega = {omega} (condition estimate {condition_estimate:e})")]
    SingularAtFrequency { omega: f64, condition_estimate: f64 },
    #[error("no closed-form circulator matrix for theta = {0}")]
    UnsupportedPhase(f64),
    #[error("invalid frequency grid: {0}")]
    InvalidGrid(String),
}
