use std::io;

use compacton_core::Error as CoreError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Core(#[from] CoreError),

    #[error("{context}: {source}")]
    Io { context: String, source: io::Error },

    #[error("{0} check(s) failed")]
    ChecksFailed(usize),
}

impl CliError {
    pub fn io(context: impl Into<String>) -> impl FnOnce(io::Error) -> CliError {
        let context = context.into();
        move |source| CliError::Io { context, source }
    }

    /// 2 for rejected input, 1 for everything that went wrong while running.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Core(e) => match e {
                CoreError::InvalidExponent { .. }
                | CoreError::InvalidVelocity(_)
                | CoreError::InvalidParameter { .. }
                | CoreError::SupportTooWide { .. }
                | CoreError::Ordering { .. } => 2,
                _ => 1,
            },
            CliError::Io { .. } | CliError::ChecksFailed(_) => 1,
        }
    }
}
