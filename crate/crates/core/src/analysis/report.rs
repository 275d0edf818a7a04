//! Per-suite accuracy, the model × suite results matrix, size slopes and
//! complexity trends.

use std::collections::{BTreeMap, BTreeSet};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::registry::{ModelInfo, REGRESSION_FAMILIES};
use super::stats::{binomial_p, fit_slope, mean_sem, wilson, MeanInterval, RegressionFit, StatsError, Tail, Z95};
use crate::generator::DEFAULT_SUITES;
use crate::scoring::{find_score_files, import_scores, ScoreFileError, SuiteScores};
use crate::Language;

/// Significance level for the one-sided tests.
pub const ALPHA: f64 = 0.05;

#[derive(Debug, thiserror::Error)]
pub enum AnalysisError {
    #[error("suite `{suite}` for `{model}` has no scored pairs")]
    Empty { model: String, suite: String },
    #[error(transparent)]
    Stats(#[from] StatsError),
    #[error(transparent)]
    ScoreFile(#[from] ScoreFileError),
    #[error("results for `{model}` on `{suite}` given twice")]
    Duplicate { model: String, suite: String },
    #[error("no result for `{model}` on `{suite}`")]
    MissingCell { model: String, suite: String },
    #[error("`{model}`: n differs between `{from}` ({n_from}) and `{to}` ({n_to})")]
    MismatchedN {
        model: String,
        from: String,
        to: String,
        n_from: usize,
        n_to: usize,
    },
    #[error("{family} on `{suite}` has {found} usable versions, need at least 2")]
    InsufficientVersions {
        suite: String,
        family: String,
        found: usize,
    },
    #[error("no models to compare")]
    NoModels,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteResult {
    pub suite_name: String,
    pub model_id: String,
    pub n: usize,
    pub k_correct: usize,
    pub accuracy: f64,
    pub ci_low: f64,
    pub ci_high: f64,
    pub p_above: f64,
    pub p_below: f64,
}

impl SuiteResult {
    /// `"above"` or `"below"` chance at [`ALPHA`], empty otherwise.
    pub fn significance(&self) -> &'static str {
        if self.p_above < ALPHA {
            "above"
        } else if self.p_below < ALPHA {
            "below"
        } else {
            ""
        }
    }
}

pub fn accuracy_from_counts(suite: &str, model: &str, k: usize, n: usize) -> Result<SuiteResult, AnalysisError> {
    if n == 0 {
        return Err(AnalysisError::Empty {
            model: model.into(),
            suite: suite.into(),
        });
    }
    let (k64, n64) = (k as u64, n as u64);
    let (ci_low, ci_high) = wilson(k64, n64, Z95)?;
    Ok(SuiteResult {
        suite_name: suite.into(),
        model_id: model.into(),
        n,
        k_correct: k,
        accuracy: k as f64 / n as f64,
        ci_low,
        ci_high,
        p_above: binomial_p(k64, n64, Tail::Above)?,
        p_below: binomial_p(k64, n64, Tail::Below)?,
    })
}

pub fn accuracy_report(scores: &SuiteScores) -> Result<SuiteResult, AnalysisError> {
    accuracy_from_counts(&scores.suite_name, &scores.model_id, scores.k_correct(), scores.n())
}

/// Position of a suite in report order: shipped suites first, others by name.
fn suite_order(name: &str) -> (usize, &str) {
    let pos = DEFAULT_SUITES
        .iter()
        .position(|s| *s == name)
        .unwrap_or(DEFAULT_SUITES.len());
    (pos, name)
}

/// Accuracy for every scored (model, suite) cell.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct ResultsMatrix {
    cells: BTreeMap<(String, String), SuiteResult>,
}

impl ResultsMatrix {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn insert(&mut self, result: SuiteResult) -> Result<(), AnalysisError> {
        let key = (result.model_id.clone(), result.suite_name.clone());
        if self.cells.contains_key(&key) {
            return Err(AnalysisError::Duplicate {
                model: key.0,
                suite: key.1,
            });
        }
        self.cells.insert(key, result);
        Ok(())
    }

    pub fn from_scores<'a>(scores: impl IntoIterator<Item = &'a SuiteScores>) -> Result<Self, AnalysisError> {
        let mut m = Self::new();
        for s in scores {
            m.insert(accuracy_report(s)?)?;
        }
        Ok(m)
    }

    /// Loads every `<model>/<suite>.scores.jsonl` under `dir`.
    pub fn from_score_dir(dir: &Path) -> Result<Self, AnalysisError> {
        let mut m = Self::new();
        for path in find_score_files(dir)? {
            m.insert(accuracy_report(&import_scores(&path)?)?)?;
        }
        Ok(m)
    }

    pub fn get(&self, model: &str, suite: &str) -> Option<&SuiteResult> {
        self.cells.get(&(model.to_string(), suite.to_string()))
    }

    pub fn len(&self) -> usize {
        self.cells.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cells.is_empty()
    }

    pub fn models(&self) -> Vec<&str> {
        let set: BTreeSet<&str> = self.cells.keys().map(|(m, _)| m.as_str()).collect();
        set.into_iter().collect()
    }

    /// Suites in report order.
    pub fn suites(&self) -> Vec<&str> {
        let mut v: Vec<&str> = self
            .cells
            .keys()
            .map(|(_, s)| s.as_str())
            .collect::<BTreeSet<_>>()
            .into_iter()
            .collect();
        v.sort_by_key(|s| suite_order(s));
        v
    }

    /// Cells ordered by model, then suite in report order.
    pub fn results(&self) -> Vec<&SuiteResult> {
        let mut v: Vec<&SuiteResult> = self.cells.values().collect();
        v.sort_by(|a, b| {
            (a.model_id.as_str(), suite_order(&a.suite_name)).cmp(&(b.model_id.as_str(), suite_order(&b.suite_name)))
        });
        v
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeRow {
    pub suite: String,
    /// One fit per family, in [`REGRESSION_FAMILIES`] order.
    pub fits: Vec<RegressionFit>,
    pub average: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlopeTable {
    pub families: Vec<String>,
    pub rows: Vec<SlopeRow>,
}

/// Accuracy-percent on parameter-billions slopes per (suite, family),
/// skipping models marked as excluded. Rows follow report order.
pub fn slope_table(results: &ResultsMatrix, registry: &[ModelInfo]) -> Result<SlopeTable, AnalysisError> {
    let mut rows = Vec::new();
    for suite in results.suites() {
        let mut fits = Vec::with_capacity(REGRESSION_FAMILIES.len());
        for family in REGRESSION_FAMILIES {
            let points: Vec<(f64, f64)> = registry
                .iter()
                .filter(|m| m.family == family && m.in_regression())
                .filter_map(|m| results.get(&m.id, suite).map(|r| (m.billions(), r.accuracy * 100.0)))
                .collect();
            if points.len() < 2 {
                return Err(AnalysisError::InsufficientVersions {
                    suite: suite.into(),
                    family: family.into(),
                    found: points.len(),
                });
            }
            fits.push(fit_slope(&points)?);
        }
        let average = fits.iter().map(|f| f.slope).sum::<f64>() / fits.len() as f64;
        rows.push(SlopeRow {
            suite: suite.into(),
            fits,
            average,
        });
    }
    Ok(SlopeTable {
        families: REGRESSION_FAMILIES.iter().map(|f| f.to_string()).collect(),
        rows,
    })
}

/// Where a suite sits on its language's intervening-content scale.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct ComplexityKey {
    pub language: Language,
    /// `ne` / `no-ne` for Hindi, `verbal` / `adjectival` for Swahili.
    pub series: String,
    pub level: u8,
}

/// Reads the complexity position from a suite name. Basque suites and
/// unknown shapes have none.
pub fn complexity_key(suite: &str) -> Option<ComplexityKey> {
    let key = |language, series: &str, level| {
        Some(ComplexityKey {
            language,
            series: series.into(),
            level,
        })
    };
    if let Some(shape) = suite.strip_prefix("hindi-") {
        let (series, rest) = match shape.strip_prefix("S_ne_") {
            Some(rest) => ("ne", rest),
            None => ("no-ne", shape.strip_prefix("S_")?),
        };
        let level = match rest {
            "O_V" => 1,
            "PossPRN_O_V" => 2,
            "PossPRN_PossN_O_V" => 3,
            _ => return None,
        };
        return key(Language::Hindi, series, level);
    }
    let (series, level) = match suite.strip_prefix("swahili-N_of_")? {
        "Poss_V" => ("verbal", 1),
        "Poss_D_V" => ("verbal", 2),
        "Poss_D_A_V" => ("verbal", 3),
        "Poss_D_A_RelV_V" => ("verbal", 4),
        "Poss_ni_A" => ("adjectival", 1),
        "Poss_D_ni_A" => ("adjectival", 2),
        "Poss_D_AP_ni_AN" => ("adjectival", 3),
        "Poss_D_AP_V_ni_AN" => ("adjectival", 4),
        _ => return None,
    };
    key(Language::Swahili, series, level)
}

#[derive(Debug, Clone, PartialEq)]
pub struct ComplexityDelta {
    pub from_suite: String,
    pub to_suite: String,
    /// `k_correct(to) - k_correct(from)` per model, by model id.
    pub per_model: Vec<(String, i64)>,
    pub summary: MeanInterval,
}

/// Correct-count change from `from_suite` to `to_suite` for every model
/// that has results on either.
pub fn complexity_delta(
    results: &ResultsMatrix,
    from_suite: &str,
    to_suite: &str,
) -> Result<ComplexityDelta, AnalysisError> {
    let models: BTreeSet<&str> = results
        .models()
        .into_iter()
        .filter(|m| results.get(m, from_suite).is_some() || results.get(m, to_suite).is_some())
        .collect();
    if models.is_empty() {
        return Err(AnalysisError::NoModels);
    }
    let cell = |model: &str, suite: &str| {
        results.get(model, suite).ok_or_else(|| AnalysisError::MissingCell {
            model: model.into(),
            suite: suite.into(),
        })
    };
    let mut per_model = Vec::with_capacity(models.len());
    for model in models {
        let (a, b) = (cell(model, from_suite)?, cell(model, to_suite)?);
        if a.n != b.n {
            return Err(AnalysisError::MismatchedN {
                model: model.into(),
                from: from_suite.into(),
                to: to_suite.into(),
                n_from: a.n,
                n_to: b.n,
            });
        }
        per_model.push((model.to_string(), b.k_correct as i64 - a.k_correct as i64));
    }
    let values: Vec<f64> = per_model.iter().map(|(_, d)| *d as f64).collect();
    Ok(ComplexityDelta {
        from_suite: from_suite.into(),
        to_suite: to_suite.into(),
        per_model,
        summary: mean_sem(&values)?,
    })
}

/// Deltas between neighbouring levels of every complexity series present.
pub fn complexity_steps(results: &ResultsMatrix) -> Result<Vec<(ComplexityKey, ComplexityDelta)>, AnalysisError> {
    let mut by_key: BTreeMap<ComplexityKey, &str> = BTreeMap::new();
    for s in results.suites() {
        if let Some(k) = complexity_key(s) {
            by_key.insert(k, s);
        }
    }
    let entries: Vec<_> = by_key.into_iter().collect();
    let mut out = Vec::new();
    for w in entries.windows(2) {
        let ((ka, sa), (kb, sb)) = (&w[0], &w[1]);
        if ka.language == kb.language && ka.series == kb.series {
            out.push((kb.clone(), complexity_delta(results, sa, sb)?));
        }
    }
    Ok(out)
}

/// One point of a complexity trend: a model family's mean accuracy over its
/// versions on one suite.
#[derive(Debug, Clone, PartialEq)]
pub struct TrendPoint {
    pub key: ComplexityKey,
    pub suite: String,
    /// Family name, or the model id for models outside the registry.
    pub group: String,
    pub accuracy: MeanInterval,
}

pub fn complexity_trends(results: &ResultsMatrix, registry: &[ModelInfo]) -> Result<Vec<TrendPoint>, AnalysisError> {
    let family: BTreeMap<&str, &str> = registry.iter().map(|m| (m.id.as_str(), m.family.as_str())).collect();
    let mut out = Vec::new();
    for suite in results.suites() {
        let Some(key) = complexity_key(suite) else { continue };
        let mut groups: BTreeMap<&str, Vec<f64>> = BTreeMap::new();
        for model in results.models() {
            if let Some(r) = results.get(model, suite) {
                let g = family.get(model).copied().unwrap_or(model);
                groups.entry(g).or_default().push(r.accuracy);
            }
        }
        for (group, acc) in groups {
            out.push(TrendPoint {
                key: key.clone(),
                suite: suite.into(),
                group: group.into(),
                accuracy: mean_sem(&acc)?,
            });
        }
    }
    out.sort_by(|a, b| (&a.key, &a.group).cmp(&(&b.key, &b.group)));
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct LanguageAverage {
    pub language: Language,
    pub cells: usize,
    /// Unweighted mean over (model, suite) cells.
    pub mean_accuracy: f64,
}

pub fn language_averages(results: &ResultsMatrix) -> Vec<LanguageAverage> {
    let mut acc: BTreeMap<Language, Vec<f64>> = BTreeMap::new();
    for r in results.results() {
        if let Some(lang) = Language::from_suite_name(&r.suite_name) {
            acc.entry(lang).or_default().push(r.accuracy);
        }
    }
    acc.into_iter()
        .map(|(language, v)| LanguageAverage {
            language,
            cells: v.len(),
            mean_accuracy: v.iter().sum::<f64>() / v.len() as f64,
        })
        .collect()
}
