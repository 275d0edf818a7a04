use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tse_core::analysis::{
    complexity_steps, complexity_trends, default_registry_path, language_averages, load_registry, slope_table, tables,
    AnalysisError, ReportMeta, ResultsMatrix,
};
use tse_core::generator::import_suite;
use tse_core::scoring::{check_pair_ids, find_score_files, import_scores};

use crate::args::{AnalyzeArgs, ReportKind};
use crate::manifest::{digest_inputs, RunManifest};
use crate::{existing_dir, existing_file, require, snapshot, CliError, Ctx, Outcome};

#[derive(Debug, Serialize)]
struct AnalyzeConfig {
    scores: PathBuf,
    registry: PathBuf,
    suites: Option<PathBuf>,
    out: PathBuf,
    reports: Vec<ReportKind>,
    reports_explicit: bool,
}

fn data(e: impl ToString) -> CliError {
    CliError::Data(e.to_string())
}

/// The generation seed, read from the suite directory's run manifest.
fn seed_provenance(suites: Option<&Path>) -> String {
    let Some(dir) = suites else {
        return "not recorded (run analyze with --suites)".into();
    };
    match RunManifest::read(dir).and_then(|m| m.config.get("seed").cloned()) {
        Some(seed) => format!("generate --seed {seed}"),
        None => format!("not recorded in {}", dir.display()),
    }
}

/// Loads every score file, checking pair ids against the suites when given.
fn load_matrix(scores_dir: &Path, suites: Option<&Path>) -> Result<ResultsMatrix, CliError> {
    let mut matrix = ResultsMatrix::new();
    for path in find_score_files(scores_dir).map_err(data)? {
        let scores = import_scores(&path).map_err(data)?;
        if let Some(dir) = suites {
            let suite = import_suite(dir, &scores.suite_name).map_err(data)?;
            let ids: BTreeSet<u32> = suite.pairs.iter().map(|p| p.id).collect();
            check_pair_ids(&scores, &ids, &path).map_err(data)?;
        }
        matrix
            .insert(tse_core::analysis::accuracy_report(&scores).map_err(data)?)
            .map_err(data)?;
    }
    if matrix.is_empty() {
        return Err(CliError::Data(format!("no score files under {}", scores_dir.display())));
    }
    Ok(matrix)
}

/// Whether a report failed only because the scores do not cover what it needs.
fn is_coverage_gap(e: &AnalysisError) -> bool {
    matches!(
        e,
        AnalysisError::InsufficientVersions { .. } | AnalysisError::MissingCell { .. } | AnalysisError::NoModels
    )
}

pub(crate) fn run(ctx: &Ctx, args: AnalyzeArgs) -> Result<Outcome, CliError> {
    let explicit = !args.reports.is_empty();
    let mut reports = if explicit {
        args.reports
    } else {
        vec![
            ReportKind::Matrix,
            ReportKind::Slopes,
            ReportKind::Complexity,
            ReportKind::Averages,
        ]
    };
    reports.sort();
    reports.dedup();
    let cfg = AnalyzeConfig {
        scores: require(args.scores, "scores")?,
        registry: args.registry.unwrap_or_else(default_registry_path),
        suites: args.suites,
        out: require(args.out, "out")?,
        reports,
        reports_explicit: explicit,
    };
    existing_dir(&cfg.scores, "score")?;
    existing_file(&cfg.registry, "registry")?;
    let mut input_paths: Vec<&Path> = vec![&cfg.scores, &cfg.registry];
    if let Some(s) = &cfg.suites {
        existing_dir(s, "suite")?;
        input_paths.push(s);
    }
    let inputs = digest_inputs(&input_paths)?;

    let registry = load_registry(&cfg.registry).map_err(data)?;
    let matrix = load_matrix(&cfg.scores, cfg.suites.as_deref())?;
    let meta = ReportMeta::new(seed_provenance(cfg.suites.as_deref()));
    ctx.say(format!(
        "{} results for {} models on {} suites",
        matrix.len(),
        matrix.models().len(),
        matrix.suites().len()
    ));

    let mut files: Vec<(&str, String)> = Vec::new();
    let mut notes = Vec::new();
    let mut skip_or_fail = |what: &str, e: AnalysisError| -> Result<(), CliError> {
        if !explicit && is_coverage_gap(&e) {
            let note = format!("{what} skipped: {e}");
            ctx.say(&note);
            notes.push(note);
            Ok(())
        } else {
            Err(data(e))
        }
    };
    for report in &cfg.reports {
        match report {
            ReportKind::Matrix => files.push((tables::MATRIX_CSV, tables::matrix_csv(&meta, &matrix))),
            ReportKind::Slopes => match slope_table(&matrix, &registry) {
                Ok(t) => files.push((tables::SLOPES_CSV, tables::slopes_csv(&meta, &t))),
                Err(e) => skip_or_fail("slopes", e)?,
            },
            ReportKind::Complexity => {
                let trends = complexity_trends(&matrix, &registry).map_err(data)?;
                files.push((tables::COMPLEXITY_CSV, tables::complexity_csv(&meta, &trends)));
                match complexity_steps(&matrix) {
                    Ok(steps) => files.push((
                        tables::COMPLEXITY_DELTAS_CSV,
                        tables::complexity_deltas_csv(&meta, &steps),
                    )),
                    Err(e) => skip_or_fail("complexity deltas", e)?,
                }
            }
            ReportKind::Averages => files.push((
                tables::AVERAGES_CSV,
                tables::averages_csv(&meta, &language_averages(&matrix)),
            )),
        }
    }

    let mut outputs = Vec::new();
    for (name, text) in files {
        tables::write_table(&cfg.out, name, &text).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out.display())))?;
        ctx.say(format!("wrote {}", cfg.out.join(name).display()));
        outputs.push(name.to_string());
    }
    Ok(Outcome {
        out_dir: cfg.out.clone(),
        config: snapshot(&cfg),
        inputs,
        outputs,
        notes,
    })
}
