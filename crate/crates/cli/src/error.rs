use loewner_core::Error;

/// Failures of a run, split by exit code.
#[derive(Debug, thiserror::Error)]
pub enum CliError {
    /// Unreadable or schema-invalid input (exit 2).
    #[error("invalid input: {0}")]
    Input(String),
    /// Numerical breakdown while running the task (exit 1).
    #[error("numerical failure: {0}")]
    Numerical(#[source] Error),
    #[error("cannot write output: {0}")]
    Output(#[from] std::io::Error),
}

impl CliError {
    pub fn input(e: Error) -> CliError {
        CliError::Input(e.to_string())
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Numerical(_) | CliError::Output(_) => 1,
        }
    }
}

/// Library errors raised while running: bad arguments still count as input
/// errors, everything else as numerical failure.
impl From<Error> for CliError {
    fn from(e: Error) -> CliError {
        match e {
            Error::OutsideBall(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidDescriptor(_)
            | Error::InvalidJet(_)
            | Error::IndexOutOfRange { .. }
            | Error::InvalidField(_)
            | Error::InvalidTimes(_)
            | Error::InvalidNeedle(_)
            | Error::InvalidFunctional(_)
            | Error::EmptyGrid(_)
            | Error::InvalidArgument(_) => CliError::Input(e.to_string()),
            _ => CliError::Numerical(e),
        }
    }
}
