use std::fmt;

use oim_core::OimError;

#[derive(Debug)]
pub enum CliError {
    /// Bad flag values, caught before any input is read.
    Usage(String),
    Core(OimError),
    /// A self-check failed; carries the name of the first failing check.
    Verify(String),
}

impl CliError {
    pub fn code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Core(e) => match e {
                OimError::InvalidParam(_) => 1,
                OimError::NonFinite(_) | OimError::NoConvergence { .. } => 3,
                _ => 2,
            },
            CliError::Verify(_) => 4,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "{m}"),
            CliError::Core(e) => write!(f, "{e}"),
            CliError::Verify(name) => write!(f, "verification failed: {name}"),
        }
    }
}

impl From<OimError> for CliError {
    fn from(e: OimError) -> Self {
        CliError::Core(e)
    }
}
