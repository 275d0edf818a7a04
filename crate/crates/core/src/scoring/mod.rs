//! The scorer boundary: anything that returns `log P(target | condition)`.
//!
//! A pair is scored correct only if the grammatical target gets a strictly
//! higher log-probability; ties count against the model.

pub mod file;
pub mod ngram;
pub mod remote;

use std::collections::BTreeMap;
use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::generator::{MinimalPair, TestSuite};

pub use file::{
    check_pair_ids, export_scores, find_score_files, import_scores, score_file_path, ScoreFileError, ScoreMeta,
    SCORE_SUFFIX,
};
pub use ngram::{NgramError, NgramScorer};
pub use remote::{Health, RemoteConfig, RemoteScorer};

/// Items per `score_batch` call when a scorer does not say otherwise.
pub const DEFAULT_BATCH: usize = 64;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Mode {
    Causal,
    MaskedPll,
    Mock,
}

impl Mode {
    pub fn as_str(self) -> &'static str {
        match self {
            Mode::Causal => "causal",
            Mode::MaskedPll => "masked_pll",
            Mode::Mock => "mock",
        }
    }
}

impl fmt::Display for Mode {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Mode {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "causal" => Ok(Mode::Causal),
            "masked_pll" => Ok(Mode::MaskedPll),
            "mock" => Ok(Mode::Mock),
            other => Err(format!("unknown scoring mode `{other}`")),
        }
    }
}

/// What a scorer says about itself.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ScorerInfo {
    pub model_id: String,
    /// Free-text provenance (model, mode, tokenization) written to score files.
    pub descriptor: String,
    /// Set when `score` must not be called concurrently.
    pub single_threaded: bool,
    pub batch_size: usize,
}

/// One `(condition, target)` request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ScoreItem {
    pub id: String,
    pub condition: String,
    pub target: String,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoreError {
    #[error("transport: {0}")]
    Transport(String),
    #[error("protocol: {0}")]
    Protocol(String),
    #[error("scorer returned a non-finite log-probability ({0})")]
    NonFinite(f64),
    #[error("{0}")]
    Other(String),
}

impl ScoreError {
    pub fn is_transport(&self) -> bool {
        matches!(self, ScoreError::Transport(_) | ScoreError::Protocol(_))
    }
}

pub trait Scorer: Send + Sync {
    fn info(&self) -> ScorerInfo;

    fn score(&self, condition: &str, target: &str) -> Result<f64, ScoreError>;

    /// All-or-nothing batch; results follow `items` order.
    fn score_batch(&self, items: &[ScoreItem]) -> Result<Vec<f64>, ScoreError> {
        items.iter().map(|i| self.score(&i.condition, &i.target)).collect()
    }
}

/// `logp = -(number of characters in the target)`, the reference mock.
#[derive(Debug, Clone, Default)]
pub struct CharCountScorer {
    pub model_id: String,
}

impl Scorer for CharCountScorer {
    fn info(&self) -> ScorerInfo {
        ScorerInfo {
            model_id: self.model_id.clone(),
            descriptor: "mock: logp = -(target character count)".into(),
            single_threaded: false,
            batch_size: DEFAULT_BATCH,
        }
    }

    fn score(&self, _condition: &str, target: &str) -> Result<f64, ScoreError> {
        Ok(-(target.chars().count() as f64))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScoredPair {
    pub pair_id: u32,
    pub logp_grammatical: f64,
    pub logp_ungrammatical: f64,
    pub correct: bool,
}

impl ScoredPair {
    pub fn new(pair_id: u32, logp_grammatical: f64, logp_ungrammatical: f64) -> Self {
        Self {
            pair_id,
            logp_grammatical,
            logp_ungrammatical,
            correct: logp_grammatical > logp_ungrammatical,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SuiteScores {
    pub suite_name: String,
    pub model_id: String,
    pub scored: Vec<ScoredPair>,
    pub scorer_descriptor: String,
}

impl SuiteScores {
    pub fn n(&self) -> usize {
        self.scored.len()
    }

    pub fn k_correct(&self) -> usize {
        self.scored.iter().filter(|p| p.correct).count()
    }
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
#[error("pair {pair_id}: {source}")]
pub struct PairScoreError {
    pub pair_id: u32,
    pub source: ScoreError,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum ScoringError {
    #[error("suite `{0}` has no pairs")]
    EmptySuite(String),
    /// Some pairs failed; `completed` holds the rest.
    #[error("suite `{suite}`: {} of {total} pairs failed (first: {first})", failed.len())]
    Partial {
        suite: String,
        total: usize,
        failed: Vec<u32>,
        first: PairScoreError,
        completed: SuiteScores,
    },
}

fn checked(v: f64) -> Result<f64, ScoreError> {
    if v.is_finite() {
        Ok(v)
    } else {
        Err(ScoreError::NonFinite(v))
    }
}

pub fn score_pair(scorer: &dyn Scorer, pair: &MinimalPair) -> Result<ScoredPair, PairScoreError> {
    let err = |source| PairScoreError {
        pair_id: pair.id,
        source,
    };
    let g = scorer
        .score(&pair.condition, &pair.grammatical_target)
        .and_then(checked)
        .map_err(err)?;
    let u = scorer
        .score(&pair.condition, &pair.ungrammatical_target)
        .and_then(checked)
        .map_err(err)?;
    Ok(ScoredPair::new(pair.id, g, u))
}

fn items_for(pairs: &[MinimalPair]) -> Vec<ScoreItem> {
    pairs
        .iter()
        .flat_map(|p| {
            [("g", &p.grammatical_target), ("u", &p.ungrammatical_target)].map(|(tag, target)| ScoreItem {
                id: format!("{}/{tag}", p.id),
                condition: p.condition.clone(),
                target: target.clone(),
            })
        })
        .collect()
}

type BatchResult = Result<Vec<ScoredPair>, (Vec<u32>, ScoreError)>;

fn score_chunk(scorer: &dyn Scorer, pairs: &[MinimalPair]) -> BatchResult {
    let ids = || pairs.iter().map(|p| p.id).collect::<Vec<_>>();
    let logps = scorer.score_batch(&items_for(pairs)).map_err(|e| (ids(), e))?;
    if logps.len() != 2 * pairs.len() {
        let e = ScoreError::Protocol(format!("{} results for {} items", logps.len(), 2 * pairs.len()));
        return Err((ids(), e));
    }
    if let Some(bad) = logps.iter().find(|v| !v.is_finite()) {
        return Err((ids(), ScoreError::NonFinite(*bad)));
    }
    Ok(pairs
        .iter()
        .zip(logps.chunks(2))
        .map(|(p, lp)| ScoredPair::new(p.id, lp[0], lp[1]))
        .collect())
}

/// Scores every pair once, with at most `max_in_flight` concurrent batches
/// (one if the scorer is single-threaded). Output is ordered by pair id
/// and does not depend on `max_in_flight`.
#[allow(clippy::result_large_err)]
pub fn score_suite(scorer: &dyn Scorer, suite: &TestSuite, max_in_flight: usize) -> Result<SuiteScores, ScoringError> {
    if suite.pairs.is_empty() {
        return Err(ScoringError::EmptySuite(suite.name.clone()));
    }
    let info = scorer.info();
    let threads = if info.single_threaded { 1 } else { max_in_flight.max(1) };
    let per_batch = (info.batch_size / 2).max(1);
    let chunks: Vec<&[MinimalPair]> = suite.pairs.chunks(per_batch).collect();
    let results: Vec<BatchResult> = if threads == 1 {
        chunks.iter().map(|c| score_chunk(scorer, c)).collect()
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(threads)
            .build()
            .expect("thread pool");
        pool.install(|| chunks.par_iter().map(|c| score_chunk(scorer, c)).collect())
    };

    let mut scored = BTreeMap::new();
    let mut failed = Vec::new();
    let mut first = None;
    for r in results {
        match r {
            Ok(pairs) => scored.extend(pairs.into_iter().map(|p| (p.pair_id, p))),
            Err((ids, e)) => {
                if first.is_none() {
                    first = Some(PairScoreError {
                        pair_id: ids[0],
                        source: e,
                    });
                }
                failed.extend(ids);
            }
        }
    }
    // Asked again: remote scorers learn their model descriptor on first use.
    let info = scorer.info();
    let out = SuiteScores {
        suite_name: suite.name.clone(),
        model_id: info.model_id,
        scored: scored.into_values().collect(),
        scorer_descriptor: info.descriptor,
    };
    match first {
        None => Ok(out),
        Some(first) => {
            failed.sort_unstable();
            Err(ScoringError::Partial {
                suite: suite.name.clone(),
                total: suite.pairs.len(),
                failed,
                first,
                completed: out,
            })
        }
    }
}

#[cfg(test)]
mod tests;
