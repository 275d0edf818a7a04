//! Score files: `<dir>/<model_id>/<suite>.scores.jsonl`, one row
//! `{"suite", "model_id", "pair_id", "logp_grammatical", "logp_ungrammatical"}`
//! per pair, with a `.scores.meta.json` sidecar carrying the scorer
//! descriptor. Correctness flags are always recomputed on import.

use std::collections::BTreeSet;
use std::fs;
use std::io::{BufWriter, Write};
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use super::{ScoredPair, SuiteScores};

pub const SCORE_SUFFIX: &str = ".scores.jsonl";
pub const META_SUFFIX: &str = ".scores.meta.json";

/// Descriptor recorded for files that arrive without a sidecar.
pub const UNKNOWN_DESCRIPTOR: &str = "imported (no descriptor)";

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct Row {
    suite: String,
    model_id: String,
    pair_id: u32,
    logp_grammatical: f64,
    logp_ungrammatical: f64,
    /// Tolerated for foreign files, never trusted.
    #[serde(default, skip_serializing)]
    #[allow(dead_code)]
    correct: Option<bool>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreMeta {
    pub suite: String,
    pub model_id: String,
    pub scorer_descriptor: String,
    pub n: usize,
    pub tool_version: String,
}

#[derive(Debug, thiserror::Error)]
pub enum ScoreFileError {
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}:{line}: {source}")]
    Schema {
        path: PathBuf,
        line: usize,
        source: serde_json::Error,
    },
    #[error("{path}:{line}: {reason}")]
    Invalid { path: PathBuf, line: usize, reason: String },
    #[error("{path}: pair ids do not match the suite: {reason}")]
    PairIds { path: PathBuf, reason: String },
}

pub fn score_file_path(dir: &Path, model_id: &str, suite: &str) -> PathBuf {
    dir.join(model_id).join(format!("{suite}{SCORE_SUFFIX}"))
}

fn meta_path(score_path: &Path) -> PathBuf {
    let name = score_path.file_name().and_then(|n| n.to_str()).unwrap_or_default();
    let stem = name.strip_suffix(SCORE_SUFFIX).unwrap_or(name);
    score_path.with_file_name(format!("{stem}{META_SUFFIX}"))
}

fn io(path: &Path) -> impl FnOnce(std::io::Error) -> ScoreFileError + '_ {
    move |source| ScoreFileError::Io {
        path: path.to_path_buf(),
        source,
    }
}

pub fn export_scores(scores: &SuiteScores, dir: &Path) -> Result<PathBuf, ScoreFileError> {
    let path = score_file_path(dir, &scores.model_id, &scores.suite_name);
    let parent = path.parent().expect("score path has a parent");
    fs::create_dir_all(parent).map_err(io(parent))?;
    let mut w = BufWriter::new(fs::File::create(&path).map_err(io(&path))?);
    for p in &scores.scored {
        let row = Row {
            suite: scores.suite_name.clone(),
            model_id: scores.model_id.clone(),
            pair_id: p.pair_id,
            logp_grammatical: p.logp_grammatical,
            logp_ungrammatical: p.logp_ungrammatical,
            correct: None,
        };
        serde_json::to_writer(&mut w, &row).expect("row serializes");
        w.write_all(b"\n").map_err(io(&path))?;
    }
    w.flush().map_err(io(&path))?;
    let meta = ScoreMeta {
        suite: scores.suite_name.clone(),
        model_id: scores.model_id.clone(),
        scorer_descriptor: scores.scorer_descriptor.clone(),
        n: scores.scored.len(),
        tool_version: crate::TOOL_VERSION.to_string(),
    };
    let mpath = meta_path(&path);
    let mut text = serde_json::to_string_pretty(&meta).expect("meta serializes");
    text.push('\n');
    fs::write(&mpath, text).map_err(io(&mpath))?;
    Ok(path)
}

/// Reads and validates one score file; rows are returned sorted by pair id.
pub fn import_scores(path: &Path) -> Result<SuiteScores, ScoreFileError> {
    let text = fs::read_to_string(path).map_err(io(path))?;
    let invalid = |line: usize, reason: String| ScoreFileError::Invalid {
        path: path.to_path_buf(),
        line,
        reason,
    };
    let mut suite: Option<(String, String)> = None;
    let mut scored = Vec::new();
    let mut seen = BTreeSet::new();
    for (i, raw) in text.lines().enumerate() {
        let line = i + 1;
        if raw.trim().is_empty() {
            continue;
        }
        let row: Row = serde_json::from_str(raw).map_err(|source| ScoreFileError::Schema {
            path: path.to_path_buf(),
            line,
            source,
        })?;
        match &suite {
            None => suite = Some((row.suite.clone(), row.model_id.clone())),
            Some((s, m)) if *s == row.suite && *m == row.model_id => {}
            Some((s, m)) => {
                return Err(invalid(
                    line,
                    format!("row is for {}/{}, file is for {m}/{s}", row.model_id, row.suite),
                ))
            }
        }
        if !row.logp_grammatical.is_finite() || !row.logp_ungrammatical.is_finite() {
            return Err(invalid(line, "non-finite log-probability".into()));
        }
        if !seen.insert(row.pair_id) {
            return Err(invalid(line, format!("pair_id {} repeated", row.pair_id)));
        }
        scored.push(ScoredPair::new(
            row.pair_id,
            row.logp_grammatical,
            row.logp_ungrammatical,
        ));
    }
    let (suite_name, model_id) = suite.ok_or_else(|| invalid(0, "no rows".into()))?;
    scored.sort_by_key(|p| p.pair_id);

    let mpath = meta_path(path);
    let scorer_descriptor = if mpath.exists() {
        let mtext = fs::read_to_string(&mpath).map_err(io(&mpath))?;
        let meta: ScoreMeta = serde_json::from_str(&mtext).map_err(|source| ScoreFileError::Schema {
            path: mpath.clone(),
            line: 1,
            source,
        })?;
        if meta.suite != suite_name || meta.model_id != model_id || meta.n != scored.len() {
            return Err(ScoreFileError::Invalid {
                path: mpath,
                line: 1,
                reason: "sidecar does not describe this file".into(),
            });
        }
        meta.scorer_descriptor
    } else {
        UNKNOWN_DESCRIPTOR.to_string()
    };
    Ok(SuiteScores {
        suite_name,
        model_id,
        scored,
        scorer_descriptor,
    })
}

/// Checks that `scores` covers exactly the pair ids `expected`.
pub fn check_pair_ids(scores: &SuiteScores, expected: &BTreeSet<u32>, path: &Path) -> Result<(), ScoreFileError> {
    let got: BTreeSet<u32> = scores.scored.iter().map(|p| p.pair_id).collect();
    if got == *expected {
        return Ok(());
    }
    let missing = expected.difference(&got).count();
    let extra: Vec<_> = got.difference(expected).take(5).collect();
    Err(ScoreFileError::PairIds {
        path: path.to_path_buf(),
        reason: format!("{missing} missing, unexpected ids {extra:?}"),
    })
}

/// Every score file under `dir/<model_id>/`, sorted by path.
pub fn find_score_files(dir: &Path) -> Result<Vec<PathBuf>, ScoreFileError> {
    let mut out = Vec::new();
    for model in fs::read_dir(dir).map_err(io(dir))? {
        let model = model.map_err(io(dir))?.path();
        if !model.is_dir() {
            continue;
        }
        for f in fs::read_dir(&model).map_err(io(&model))? {
            let f = f.map_err(io(&model))?.path();
            if f.to_str().is_some_and(|s| s.ends_with(SCORE_SUFFIX)) {
                out.push(f);
            }
        }
    }
    out.sort();
    Ok(out)
}
