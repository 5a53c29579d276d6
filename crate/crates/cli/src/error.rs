use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("invalid arguments: {0}")]
    InvalidArgs(String),
    #[error(transparent)]
    Core(#[from] isoest::Error),
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

/// Exit status for a failed validation run.
pub const EXIT_VALIDATION_FAILED: i32 = 1;
/// Exit status for unusable arguments or input.
pub const EXIT_INVALID_ARGS: i32 = 2;

impl CliError {
    pub fn exit_code(&self) -> i32 {
        EXIT_INVALID_ARGS
    }
}
