use thiserror::Error;

/// Failure of a CLI run, split by exit code.
#[derive(Debug, Error)]
pub enum CliError {
    /// Usage or input problem: exit code 2.
    #[error("{0}")]
    Input(String),
    /// Numerical failure during a computation: exit code 3.
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn input(msg: impl Into<String>) -> Self {
        CliError::Input(msg.into())
    }

    pub fn is_numerical(&self) -> bool {
        matches!(self, CliError::Numerical(_))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) => 3,
        }
    }
}

impl From<rydswap_core::Error> for CliError {
    fn from(e: rydswap_core::Error) -> Self {
        if e.is_numerical() {
            CliError::Numerical(e.to_string())
        } else {
            CliError::Input(e.to_string())
        }
    }
}
