use thiserror::Error;

/// Exit status for a usage error (bad arguments or config).
pub const EXIT_USAGE: u8 = 2;
/// Exit status for a failure while running an experiment.
pub const EXIT_RUNTIME: u8 = 3;
/// Failing check `i` (0-based) exits with `EXIT_CHECK_BASE + i`, capped at 125.
pub const EXIT_CHECK_BASE: u8 = 10;

#[derive(Debug, Error)]
pub enum CliError {
    /// `pointer` is a JSON pointer into the config document.
    #[error("usage error at {pointer}: {message}")]
    Usage { pointer: String, message: String },
    #[error(transparent)]
    Runtime(#[from] chernoff_lab::Error),
    #[error("io error on {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl CliError {
    pub fn usage(pointer: impl Into<String>, message: impl Into<String>) -> Self {
        CliError::Usage {
            pointer: pointer.into(),
            message: message.into(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage { .. } => EXIT_USAGE,
            CliError::Runtime(_) | CliError::Io { .. } => EXIT_RUNTIME,
        }
    }
}

pub fn check_exit_code(index: usize) -> u8 {
    (EXIT_CHECK_BASE as usize + index).min(125) as u8
}
