use rewlfp::mdp::{MdpError, ModelParseError};
use rewlfp::{ExtRealError, FixpointError, PgclParseError};
use thiserror::Error;

/// Everything that ends a command early. Each variant maps to an exit code.
#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("resource cap: {0}")]
    ResourceCap(String),
}

impl CliError {
    pub fn input(context: impl std::fmt::Display, err: impl std::fmt::Display) -> Self {
        CliError::Input(format!("{}: {}", context, err))
    }

    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 1,
            CliError::ResourceCap(_) => 2,
        }
    }
}

impl From<FixpointError> for CliError {
    fn from(e: FixpointError) -> Self {
        match e {
            FixpointError::ResourceCap { .. } => CliError::ResourceCap(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<MdpError> for CliError {
    fn from(e: MdpError) -> Self {
        match e {
            MdpError::EnumerationBoundExceeded { .. } => CliError::ResourceCap(e.to_string()),
            other => CliError::Input(other.to_string()),
        }
    }
}

impl From<ModelParseError> for CliError {
    fn from(e: ModelParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<PgclParseError> for CliError {
    fn from(e: PgclParseError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<ExtRealError> for CliError {
    fn from(e: ExtRealError) -> Self {
        CliError::Input(e.to_string())
    }
}
