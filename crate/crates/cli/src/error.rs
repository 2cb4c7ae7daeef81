use std::fmt;
use std::process::ExitCode;

/// Failures are split by who has to fix them: bad input exits with 2,
/// anything else with 1.
#[derive(Debug)]
pub enum CliError {
    Input(anyhow::Error),
    Internal(anyhow::Error),
}

impl CliError {
    pub fn input(err: impl Into<anyhow::Error>) -> Self {
        CliError::Input(err.into())
    }

    pub fn internal(err: impl Into<anyhow::Error>) -> Self {
        CliError::Internal(err.into())
    }

    pub fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Input(_) => ExitCode::from(2),
            CliError::Internal(_) => ExitCode::from(1),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let (kind, err) = match self {
            CliError::Input(e) => ("input error", e),
            CliError::Internal(e) => ("internal error", e),
        };
        write!(f, "{kind}: {err:#}")
    }
}

pub type CliResult<T> = Result<T, CliError>;

/// Tags a fallible result as an input problem, with context.
pub trait InputContext<T> {
    fn input(self, context: impl fmt::Display) -> CliResult<T>;
}

impl<T, E: Into<anyhow::Error>> InputContext<T> for Result<T, E> {
    fn input(self, context: impl fmt::Display) -> CliResult<T> {
        self.map_err(|e| CliError::Input(e.into().context(context.to_string())))
    }
}
