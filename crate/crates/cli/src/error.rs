use flowembed_core::flows::FlowError;
use flowembed_core::phi::PhiError;
use flowembed_core::signals::SignalError;
use flowembed_core::theta::ThetaError;
use flowembed_core::tiling::TilingError;
use serde_json::json;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("io on {path}: {message}")]
    Io { path: String, message: String },
    #[error("malformed json in {path}: {message}")]
    Json { path: String, message: String },
    #[error(transparent)]
    Tiling(#[from] TilingError),
    #[error(transparent)]
    Signal(#[from] SignalError),
    #[error(transparent)]
    Theta(#[from] ThetaError),
    #[error(transparent)]
    Phi(#[from] PhiError),
    #[error(transparent)]
    Flow(#[from] FlowError),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Io { .. } => "io",
            CliError::Json { .. } => "json",
            CliError::Tiling(_) => "tiling",
            CliError::Signal(_) => "signal",
            CliError::Theta(_) => "theta",
            CliError::Phi(_) => "phi",
            CliError::Flow(_) => "flow",
        }
    }

    /// 2 for unusable input, 1 for a computation that could not be carried out.
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) | CliError::Io { .. } | CliError::Json { .. } => 2,
            _ => 1,
        }
    }

    pub fn to_json(&self) -> String {
        json!({ "error": self.kind(), "message": self.to_string(), "exit_code": self.exit_code() }).to_string()
    }
}
