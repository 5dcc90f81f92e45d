use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    /// Bad flags, config file or parameter values.
    #[error("config error: {0}")]
    Config(String),
    /// Every trial failed to produce a measurement.
    #[error("measurement failed: {0}")]
    Measurement(String),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Measurement(_) => 2,
        }
    }
}

impl From<holonomy::Error> for CliError {
    fn from(e: holonomy::Error) -> Self {
        match e {
            holonomy::Error::InvalidParameter(_) | holonomy::Error::GapClosed { .. } => {
                CliError::Config(e.to_string())
            }
            _ => CliError::Measurement(e.to_string()),
        }
    }
}
