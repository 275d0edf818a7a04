//! On-disk suite format: `<suite>.jsonl`, one pair per line, plus a
//! `<suite>.manifest.json` sidecar.

use std::collections::BTreeMap;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{MinimalPair, TestSuite};
use crate::lang::Language;
use crate::text;

pub const SUITE_SUFFIX: &str = ".jsonl";
pub const MANIFEST_SUFFIX: &str = ".manifest.json";

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteManifest {
    pub name: String,
    pub language: Language,
    pub template_id: String,
    pub seed: u64,
    pub n: usize,
    pub tool_version: String,
    pub validated: bool,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct PairLine {
    suite: String,
    id: u32,
    condition: String,
    grammatical_target: String,
    ungrammatical_target: String,
    #[serde(default)]
    metadata: BTreeMap<String, String>,
}

#[derive(Debug, thiserror::Error)]
pub enum SuiteFormatError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Json {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error("{path}:{line}: text is not NFC-normalized")]
    NotNormalized { path: PathBuf, line: usize },
    #[error("{path}:{line}: {reason}")]
    Inconsistent { path: PathBuf, line: usize, reason: String },
}

pub fn suite_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}{SUITE_SUFFIX}"))
}

pub fn manifest_path(dir: &Path, name: &str) -> PathBuf {
    dir.join(format!("{name}{MANIFEST_SUFFIX}"))
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> SuiteFormatError + '_ {
    move |source| SuiteFormatError::Io {
        path: path.to_path_buf(),
        source,
    }
}

fn normalized(pair: &MinimalPair) -> bool {
    [&pair.condition, &pair.grammatical_target, &pair.ungrammatical_target]
        .into_iter()
        .chain(pair.metadata.values())
        .all(|s| text::is_normalized(s))
}

/// Writes the suite and its manifest; returns the `.jsonl` path.
pub fn export_suite(suite: &TestSuite, dir: &Path) -> Result<PathBuf, SuiteFormatError> {
    let path = suite_path(dir, &suite.name);
    fs::create_dir_all(dir).map_err(io_err(dir))?;
    if let Some(i) = suite.pairs.iter().position(|p| !normalized(p)) {
        return Err(SuiteFormatError::NotNormalized { path, line: i + 1 });
    }
    let file = fs::File::create(&path).map_err(io_err(&path))?;
    let mut w = BufWriter::new(file);
    for (i, p) in suite.pairs.iter().enumerate() {
        let line = PairLine {
            suite: suite.name.clone(),
            id: p.id,
            condition: p.condition.clone(),
            grammatical_target: p.grammatical_target.clone(),
            ungrammatical_target: p.ungrammatical_target.clone(),
            metadata: p.metadata.clone(),
        };
        serde_json::to_writer(&mut w, &line).map_err(|source| SuiteFormatError::Json {
            path: path.clone(),
            line: i + 1,
            source,
        })?;
        w.write_all(b"\n").map_err(io_err(&path))?;
    }
    w.flush().map_err(io_err(&path))?;

    let manifest = SuiteManifest {
        name: suite.name.clone(),
        language: suite.language,
        template_id: suite.template_id.clone(),
        seed: suite.seed,
        n: suite.pairs.len(),
        tool_version: crate::TOOL_VERSION.to_string(),
        validated: suite.validated,
    };
    let mpath = manifest_path(dir, &suite.name);
    let mut text = serde_json::to_string_pretty(&manifest).expect("manifest serializes");
    text.push('\n');
    fs::write(&mpath, text).map_err(io_err(&mpath))?;
    Ok(path)
}

pub fn read_manifest(dir: &Path, name: &str) -> Result<SuiteManifest, SuiteFormatError> {
    let path = manifest_path(dir, name);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    serde_json::from_str(&text).map_err(|source| SuiteFormatError::Json { path, line: 1, source })
}

/// Reads `<dir>/<name>.jsonl` and its manifest back into a suite.
pub fn import_suite(dir: &Path, name: &str) -> Result<TestSuite, SuiteFormatError> {
    let manifest = read_manifest(dir, name)?;
    let path = suite_path(dir, name);
    let text = fs::read_to_string(&path).map_err(io_err(&path))?;
    let mut pairs = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let l: PairLine = serde_json::from_str(raw).map_err(|source| SuiteFormatError::Json {
            path: path.clone(),
            line,
            source,
        })?;
        if l.suite != name {
            return Err(SuiteFormatError::Inconsistent {
                path,
                line,
                reason: format!("pair belongs to suite `{}`", l.suite),
            });
        }
        let pair = MinimalPair {
            id: l.id,
            condition: l.condition,
            grammatical_target: l.grammatical_target,
            ungrammatical_target: l.ungrammatical_target,
            metadata: l.metadata,
        };
        if !normalized(&pair) {
            return Err(SuiteFormatError::NotNormalized { path, line });
        }
        pairs.push(pair);
    }
    if pairs.len() != manifest.n {
        return Err(SuiteFormatError::Inconsistent {
            path,
            line: pairs.len(),
            reason: format!("manifest promises {} pairs, file has {}", manifest.n, pairs.len()),
        });
    }
    Ok(TestSuite {
        name: manifest.name,
        language: manifest.language,
        template_id: manifest.template_id,
        seed: manifest.seed,
        validated: manifest.validated,
        pairs,
    })
}

/// Names of all suites in `dir` (files with a manifest), sorted.
pub fn list_suites(dir: &Path) -> Result<Vec<String>, SuiteFormatError> {
    let mut names = Vec::new();
    for entry in fs::read_dir(dir).map_err(io_err(dir))? {
        let entry = entry.map_err(io_err(dir))?;
        if let Some(name) = entry.file_name().to_str().and_then(|n| n.strip_suffix(MANIFEST_SUFFIX)) {
            names.push(name.to_string());
        }
    }
    names.sort();
    Ok(names)
}
