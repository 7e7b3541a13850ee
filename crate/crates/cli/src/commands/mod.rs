pub mod align;
pub mod audio;
pub mod chunk;
pub mod formats;
pub mod manifest;
pub mod score;

/// Command outcomes split usage errors (exit 2) from runtime errors
/// (exit 1); successful runs return their own exit code for strict-mode
/// reporting.
#[derive(Debug)]
pub enum CommandError {
    Usage(String),
    Run(anyhow::Error),
}

impl From<anyhow::Error> for CommandError {
    fn from(e: anyhow::Error) -> Self {
        CommandError::Run(e)
    }
}

pub type CommandResult = Result<u8, CommandError>;

pub fn usage(message: impl Into<String>) -> CommandError {
    CommandError::Usage(message.into())
}
