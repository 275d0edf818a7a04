//! CSV renderings of the reports. Every file opens with `#` metadata lines;
//! numbers use fixed formatting so identical inputs give identical bytes.

use std::fs;
use std::io;
use std::path::{Path, PathBuf};

use super::report::{ComplexityDelta, ComplexityKey, LanguageAverage, ResultsMatrix, SlopeTable, TrendPoint, ALPHA};
use super::stats::Z95;

pub const MATRIX_CSV: &str = "matrix.csv";
pub const SLOPES_CSV: &str = "slopes.csv";
pub const COMPLEXITY_CSV: &str = "complexity.csv";
pub const COMPLEXITY_DELTAS_CSV: &str = "complexity_deltas.csv";
pub const AVERAGES_CSV: &str = "averages.csv";

/// Provenance written at the top of every table.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReportMeta {
    pub tool_version: String,
    /// Where the scored suites came from, e.g. `seed=42`.
    pub seed: String,
}

impl ReportMeta {
    pub fn new(seed: impl Into<String>) -> Self {
        Self {
            tool_version: crate::TOOL_VERSION.into(),
            seed: seed.into(),
        }
    }

    fn header(&self) -> String {
        format!(
            "# tool_version: {}\n\
             # ci_method: Wilson score interval, 95% (z = {Z95})\n\
             # significance: one-sided exact binomial test against 0.5, alpha = {ALPHA}, no correction\n\
             # seed: {}\n",
            self.tool_version, self.seed
        )
    }
}

fn render(meta: &ReportMeta, header: &[&str], rows: Vec<Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for r in rows {
        w.write_record(&r).expect("in-memory write");
    }
    let body = String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8 fields");
    meta.header() + &body
}

fn f6(x: f64) -> String {
    format!("{x:.6}")
}

fn sci(x: f64) -> String {
    format!("{x:.6e}")
}

pub fn matrix_csv(meta: &ReportMeta, results: &ResultsMatrix) -> String {
    let rows = results
        .results()
        .into_iter()
        .map(|r| {
            vec![
                r.model_id.clone(),
                r.suite_name.clone(),
                r.n.to_string(),
                r.k_correct.to_string(),
                f6(r.accuracy),
                f6(r.ci_low),
                f6(r.ci_high),
                sci(r.p_above),
                sci(r.p_below),
                r.significance().into(),
            ]
        })
        .collect();
    render(
        meta,
        &[
            "model_id",
            "suite",
            "n",
            "k_correct",
            "accuracy",
            "ci_low",
            "ci_high",
            "p_above",
            "p_below",
            "significant",
        ],
        rows,
    )
}

pub fn slopes_csv(meta: &ReportMeta, table: &SlopeTable) -> String {
    let mut header = vec!["suite"];
    header.extend(table.families.iter().map(String::as_str));
    header.push("Average");
    let rows = table
        .rows
        .iter()
        .map(|row| {
            let mut r = vec![row.suite.clone()];
            r.extend(row.fits.iter().map(|f| format!("{:.3}", f.slope)));
            r.push(format!("{:.3}", row.average));
            r
        })
        .collect();
    let mut out = render(meta, &header, rows);
    out.insert_str(
        out.find("suite,").unwrap_or(0),
        "# units: accuracy percentage points per billion parameters\n",
    );
    out
}

pub fn complexity_csv(meta: &ReportMeta, trends: &[TrendPoint]) -> String {
    let rows = trends
        .iter()
        .map(|t| {
            vec![
                t.key.language.to_string(),
                t.key.series.clone(),
                t.key.level.to_string(),
                t.suite.clone(),
                t.group.clone(),
                t.accuracy.count.to_string(),
                f6(t.accuracy.mean),
                f6(t.accuracy.sem),
                f6(t.accuracy.low),
                f6(t.accuracy.high),
            ]
        })
        .collect();
    render(
        meta,
        &[
            "language",
            "series",
            "level",
            "suite",
            "group",
            "versions",
            "mean_accuracy",
            "sem",
            "ci_low",
            "ci_high",
        ],
        rows,
    )
}

/// One summary row per step, followed by the per-model deltas behind it.
pub fn complexity_deltas_csv(meta: &ReportMeta, steps: &[(ComplexityKey, ComplexityDelta)]) -> String {
    let mut rows = Vec::new();
    for (key, d) in steps {
        let prefix = || {
            vec![
                key.language.to_string(),
                key.series.clone(),
                format!("{}->{}", key.level - 1, key.level),
                d.from_suite.clone(),
                d.to_suite.clone(),
            ]
        };
        let mut r = prefix();
        r.extend([
            "mean".to_string(),
            d.summary.count.to_string(),
            f6(d.summary.mean),
            f6(d.summary.sem),
            f6(d.summary.low),
            f6(d.summary.high),
        ]);
        rows.push(r);
        for (model, delta) in &d.per_model {
            let mut r = prefix();
            r.extend([
                model.clone(),
                "1".into(),
                delta.to_string(),
                String::new(),
                String::new(),
                String::new(),
            ]);
            rows.push(r);
        }
    }
    render(
        meta,
        &[
            "language",
            "series",
            "step",
            "from_suite",
            "to_suite",
            "model_id",
            "models",
            "delta_correct",
            "sem",
            "ci_low",
            "ci_high",
        ],
        rows,
    )
}

pub fn averages_csv(meta: &ReportMeta, averages: &[LanguageAverage]) -> String {
    let rows = averages
        .iter()
        .map(|a| {
            vec![
                a.language.to_string(),
                a.cells.to_string(),
                f6(a.mean_accuracy),
                "unweighted mean over (model, suite) cells".into(),
            ]
        })
        .collect();
    render(meta, &["language", "cells", "mean_accuracy", "aggregation"], rows)
}

/// Writes `contents` to `dir/name`, creating `dir`.
pub fn write_table(dir: &Path, name: &str, contents: &str) -> io::Result<PathBuf> {
    fs::create_dir_all(dir)?;
    let path = dir.join(name);
    fs::write(&path, contents)?;
    Ok(path)
}
