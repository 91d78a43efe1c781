use thiserror::Error;

/// Errors produced by the steady-state, spectrum and dynamics routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum IobError {
    #[error("invalid parameter `{name}` = {value}: {reason}")]
    InvalidParameter {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    #[error("mechanism `{mechanism}` is inconsistent with the parameters: {reason}")]
    InconsistentMechanism {
        mechanism: &'static str,
        reason: &'static str,
    },

    #[error("no root of the inversion cubic lies in (0, 1]")]
    NoPhysicalRoot,

    #[error("local-field self-consistency is singular (|denominator| = {denominator:e})")]
    SingularFeedback { denominator: f64 },

    #[error("linear system is singular (|det| = {determinant:e})")]
    SingularMatrix { determinant: f64 },

    #[error("branch `{branch}` does not exist at omega = {omega}")]
    BranchAbsent { branch: &'static str, omega: f64 },

    #[error("fold at omega = {omega} coincides with the end of the scanned range")]
    RangeTooNarrow { omega: f64 },

    #[error("inconsistent steady state: rho22 - |rho12|^2 = {value:e}")]
    InconsistentSteadyState { value: f64 },

    #[error("integrator step size underflow at t = {time}")]
    StepSizeUnderflow { time: f64 },

    #[error("integrator exceeded {steps} steps before t = {time}")]
    TooManySteps { steps: usize, time: f64 },

    #[error("quadrature did not converge (estimated error {error:e})")]
    QuadratureFailed { error: f64 },

    #[error("invalid grid: {0}")]
    InvalidGrid(String),
}

pub type Result<T> = std::result::Result<T, IobError>;
