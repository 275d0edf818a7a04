//! The model inventory: exact parameter counts and regression exclusions.

use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

pub const REGISTRY_SCHEMA: u32 = 1;

/// Families whose versions share architecture and corpus, in report order.
pub const REGRESSION_FAMILIES: [&str; 4] = ["mGPT", "BLOOM", "XGLM", "XLM-R"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Architecture {
    Causal,
    Masked,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelInfo {
    pub id: String,
    pub family: String,
    pub version: String,
    pub parameter_count: u64,
    pub languages_supported: u32,
    pub architecture: Architecture,
    /// Reason for leaving the model out of size regressions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub excluded_from_regression: Option<String>,
}

impl ModelInfo {
    pub fn billions(&self) -> f64 {
        self.parameter_count as f64 / 1e9
    }

    pub fn in_regression(&self) -> bool {
        self.excluded_from_regression.is_none()
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RegistryFile {
    schema_version: u32,
    models: Vec<ModelInfo>,
}

#[derive(Debug, thiserror::Error)]
pub enum RegistryError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Json { path: PathBuf, source: serde_json::Error },
    #[error("{path}: {reason}")]
    Invalid { path: PathBuf, reason: String },
}

pub use crate::resources::default_registry_path;

pub fn load_registry(path: &Path) -> Result<Vec<ModelInfo>, RegistryError> {
    let text = std::fs::read_to_string(path).map_err(|source| RegistryError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    let file: RegistryFile = serde_json::from_str(&text).map_err(|source| RegistryError::Json {
        path: path.to_path_buf(),
        source,
    })?;
    let invalid = |reason: String| RegistryError::Invalid {
        path: path.to_path_buf(),
        reason,
    };
    if file.schema_version != REGISTRY_SCHEMA {
        return Err(invalid(format!("unsupported schema_version {}", file.schema_version)));
    }
    let mut ids = BTreeSet::new();
    for m in &file.models {
        if m.parameter_count == 0 {
            return Err(invalid(format!("{}: parameter_count must be positive", m.id)));
        }
        if !ids.insert(m.id.as_str()) {
            return Err(invalid(format!("duplicate model id `{}`", m.id)));
        }
    }
    Ok(file.models)
}
