use iob_core::IobError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("{0}")]
    BranchAbsent(String),
    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
    #[error("cannot write output: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::VerifyFailed(_) => 1,
            CliError::Config(_) | CliError::Io(_) => 2,
            CliError::Numerical(_) => 3,
            CliError::BranchAbsent(_) => 4,
        }
    }
}

impl From<IobError> for CliError {
    fn from(e: IobError) -> Self {
        match e {
            IobError::InvalidParameter { .. } | IobError::InconsistentMechanism { .. } | IobError::InvalidGrid(_) => {
                CliError::Config(e.to_string())
            }
            IobError::BranchAbsent { .. } => CliError::BranchAbsent(e.to_string()),
            _ => CliError::Numerical(e.to_string()),
        }
    }
}
