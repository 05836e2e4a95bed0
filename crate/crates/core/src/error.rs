use thiserror::Error;

use crate::params::ValidationError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error(transparent)]
    Validation(#[from] ValidationError),

    #[error("unknown parameter `{0}`")]
    UnknownParameter(String),

    #[error("balanced budget requires rho_g == rho_tax (got rho_g = {rho_g}, rho_tax = {rho_tax})")]
    BudgetModeConflict { rho_g: f64, rho_tax: f64 },

    #[error("state is missing symbol `{0}`")]
    MissingState(String),

    #[error("unknown shock kind `{0}`")]
    UnknownShockKind(String),

    #[error("horizon must be at least {min} (got {got})")]
    Horizon { min: usize, got: usize },

    #[error("coefficient-matching system is singular (condition number {condition:e})")]
    SingularSystem { condition: f64 },

    #[error("solution leaves the reduced-form shape: {variable}[{column}] = {value:e}")]
    AnsatzInconsistent {
        variable: &'static str,
        column: &'static str,
        value: f64,
    },

    #[error("eigenvalue iteration did not converge")]
    ConvergenceFailure,

    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Failures of the numerical machinery, as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::SingularSystem { .. }
                | Error::AnsatzInconsistent { .. }
                | Error::ConvergenceFailure
        )
    }
}
