use std::fmt::Display;

pub type CliResult<T> = Result<T, CliError>;

/// Failure of a command, split by exit status: 2 for bad input or
/// configuration, 3 for numerical failure.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn input(e: impl Display) -> Self {
        CliError::Input(e.to_string())
    }

    pub fn numerical(e: impl Display) -> Self {
        CliError::Numerical(e.to_string())
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::input(e)
    }
}

impl From<csv::Error> for CliError {
    fn from(e: csv::Error) -> Self {
        CliError::input(e)
    }
}

impl From<serde_json::Error> for CliError {
    fn from(e: serde_json::Error) -> Self {
        CliError::input(e)
    }
}
