//! Command implementations behind the `dynlis` binary.
//!
//! Every command returns its output as a string; `--json` output carries the
//! same data as the plain rendering.

pub mod commands;
pub mod input;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("{0}")]
    Io(String),
    #[error("{0}")]
    Contract(String),
    /// A failed differential run and the shrunk script that reproduces it.
    #[error("{message}")]
    Violation { message: String, repro: String },
}

impl From<dynlis::Error> for CliError {
    fn from(e: dynlis::Error) -> Self {
        CliError::Contract(e.to_string())
    }
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Parse { .. } | CliError::Io(_) => 2,
            CliError::Contract(_) | CliError::Violation { .. } => 1,
        }
    }
}
