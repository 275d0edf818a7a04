use serde::Serialize;
use serde_json::{json, Value};

/// One suite that did not score completely.
#[derive(Debug, Clone, Serialize)]
pub struct SuiteFailure {
    pub suite: String,
    pub total: usize,
    pub failed: usize,
    pub first_error: String,
    pub transport: bool,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Config(String),
    #[error("{0}")]
    Data(String),
    #[error("{0}")]
    Transport(String),
    #[error("{message}")]
    Partial {
        message: String,
        failures: Vec<SuiteFailure>,
    },
    #[error("{0}")]
    Io(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) => 2,
            CliError::Data(_) => 3,
            CliError::Transport(_) => 4,
            CliError::Partial { .. } => 5,
            CliError::Io(_) => 1,
        }
    }

    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config",
            CliError::Data(_) => "data",
            CliError::Transport(_) => "transport",
            CliError::Partial { .. } => "partial",
            CliError::Io(_) => "io",
        }
    }

    /// The machine-readable summary printed on stderr and kept in the manifest.
    pub fn summary(&self) -> Value {
        let mut v = json!({
            "status": "error",
            "kind": self.kind(),
            "exit_code": self.exit_code(),
            "message": self.to_string(),
        });
        if let CliError::Partial { failures, .. } = self {
            v["failures"] = serde_json::to_value(failures).expect("failures serialize");
        }
        v
    }
}
