use photon_router::RouterError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad arguments, scenario file, or physical parameters.
    #[error("{0}")]
    Usage(String),

    #[error(transparent)]
    Router(#[from] RouterError),

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),

    #[error("{0} verification check(s) failed")]
    VerifyFailed(usize),
}

impl CliError {
    pub fn usage(msg: impl Into<String>) -> Self {
        CliError::Usage(msg.into())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Router(e) if e.is_resolution_failure() => 3,
            CliError::Router(_) => 2,
            CliError::Io(_) | CliError::Csv(_) | CliError::VerifyFailed(_) => 1,
        }
    }
}
