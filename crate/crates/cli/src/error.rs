use std::process::ExitCode;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("configuration error: {0}")]
    Config(String),
    #[error("numeric failure: {0}")]
    Numeric(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Numeric(_) => ExitCode::from(3),
            CliError::Config(_) | CliError::Io(_) => ExitCode::from(2),
        }
    }
}

impl From<cachestp::Error> for CliError {
    fn from(e: cachestp::Error) -> Self {
        match e {
            cachestp::Error::NumericFailure(msg) => CliError::Numeric(msg),
            other => CliError::Config(other.to_string()),
        }
    }
}
