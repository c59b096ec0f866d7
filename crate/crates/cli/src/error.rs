use std::fmt;

/// A failure together with the process exit code it maps to.
#[derive(Debug)]
pub enum CliError {
    /// Bad flags, config or signature: exit 1.
    Usage(String),
    /// Numeric failure or failed criterion: exit 2.
    Numeric(String),
    /// Filesystem trouble: exit 3.
    Io(String),
}

impl CliError {
    pub fn code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Numeric(_) => 2,
            CliError::Io(_) => 3,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Numeric(m) | CliError::Io(m) => f.write_str(m),
        }
    }
}

impl From<padic_rmt::Error> for CliError {
    fn from(e: padic_rmt::Error) -> Self {
        use padic_rmt::Error as E;
        match e {
            E::Io(_) => CliError::Io(e.to_string()),
            E::PrecisionExhausted { .. }
            | E::SingularMatrix
            | E::KernelPole
            | E::ConstraintViolated(_)
            | E::InequalityViolated(_) => CliError::Numeric(e.to_string()),
            _ => CliError::Usage(e.to_string()),
        }
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

pub type CliResult<T> = Result<T, CliError>;
