//! The run manifest written into every output directory.

use std::fs;
use std::io::Read;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use crate::error::CliError;

pub const RUN_MANIFEST: &str = "tse-run.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct InputDigest {
    pub path: PathBuf,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct RunManifest {
    pub command: String,
    pub tool_version: String,
    pub argv: Vec<String>,
    /// Options after merging flags, config file and defaults.
    pub config: Value,
    pub inputs: Vec<InputDigest>,
    /// Files written, relative to the output directory.
    pub outputs: Vec<String>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
    pub status: String,
    pub exit_code: u8,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<Value>,
    pub started_unix: u64,
    pub finished_unix: u64,
}

pub fn now_unix() -> u64 {
    SystemTime::now()
        .duration_since(UNIX_EPOCH)
        .map(|d| d.as_secs())
        .unwrap_or(0)
}

pub fn sha256_file(path: &Path) -> std::io::Result<String> {
    let mut file = fs::File::open(path)?;
    let mut hasher = Sha256::new();
    let mut buf = [0u8; 1 << 16];
    loop {
        let n = file.read(&mut buf)?;
        if n == 0 {
            break;
        }
        hasher.update(&buf[..n]);
    }
    Ok(format!("{:x}", hasher.finalize()))
}

/// Digests of `paths`; directories contribute every regular file inside
/// them, in sorted order.
pub fn digest_inputs(paths: &[&Path]) -> Result<Vec<InputDigest>, CliError> {
    let mut files = Vec::new();
    for p in paths {
        collect_files(p, &mut files).map_err(|e| CliError::Config(format!("{}: {e}", p.display())))?;
    }
    files.sort();
    files.dedup();
    files
        .into_iter()
        .map(|path| {
            let sha256 = sha256_file(&path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
            Ok(InputDigest { path, sha256 })
        })
        .collect()
}

fn collect_files(path: &Path, out: &mut Vec<PathBuf>) -> std::io::Result<()> {
    if path.is_dir() {
        for entry in fs::read_dir(path)? {
            let p = entry?.path();
            if p.file_name().is_some_and(|n| n == RUN_MANIFEST) {
                continue;
            }
            collect_files(&p, out)?;
        }
    } else {
        out.push(path.to_path_buf());
    }
    Ok(())
}

impl RunManifest {
    pub fn write(&self, dir: &Path) -> Result<PathBuf, CliError> {
        fs::create_dir_all(dir).map_err(|e| CliError::Io(format!("{}: {e}", dir.display())))?;
        let path = dir.join(RUN_MANIFEST);
        let mut text = serde_json::to_string_pretty(self).expect("manifest serializes");
        text.push('\n');
        fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Ok(path)
    }

    pub fn read(dir: &Path) -> Option<RunManifest> {
        let text = fs::read_to_string(dir.join(RUN_MANIFEST)).ok()?;
        serde_json::from_str(&text).ok()
    }
}
