use std::collections::BTreeSet;
use std::path::{Path, PathBuf};

use serde::Serialize;
use tse_core::generator::{import_suite, list_suites, TestSuite};
use tse_core::scoring::{
    check_pair_ids, export_scores, import_scores, score_file_path, score_suite, CharCountScorer, Mode, NgramScorer,
    RemoteConfig, RemoteScorer, Scorer, ScoringError, SuiteScores,
};

use crate::args::{ModeArg, ScoreArgs, ScorerKind};
use crate::manifest::digest_inputs;
use crate::{existing_dir, existing_file, require, snapshot, CliError, Ctx, Outcome, SuiteFailure};

#[derive(Debug, Serialize)]
struct ScoreConfig {
    suites: PathBuf,
    scorer: ScorerKind,
    model: String,
    endpoint: Option<String>,
    mode: Option<ModeArg>,
    corpus: Option<PathBuf>,
    order: Option<usize>,
    smoothing: Option<f64>,
    from: Option<PathBuf>,
    batch_size: Option<usize>,
    suite_filter: Vec<String>,
    out: PathBuf,
    jobs: Option<usize>,
}

fn mode(m: ModeArg) -> Mode {
    match m {
        ModeArg::Causal => Mode::Causal,
        ModeArg::MaskedPll => Mode::MaskedPll,
        ModeArg::Mock => Mode::Mock,
    }
}

fn load_suites(dir: &Path, filter: &[String]) -> Result<Vec<TestSuite>, CliError> {
    let names = list_suites(dir).map_err(|e| CliError::Data(e.to_string()))?;
    let chosen: Vec<String> = if filter.is_empty() {
        names
    } else {
        for f in filter {
            if !names.contains(f) {
                return Err(CliError::Config(format!("suite `{f}` not found in {}", dir.display())));
            }
        }
        filter.to_vec()
    };
    if chosen.is_empty() {
        return Err(CliError::Data(format!("no suites in {}", dir.display())));
    }
    chosen
        .iter()
        .map(|n| import_suite(dir, n).map_err(|e| CliError::Data(e.to_string())))
        .collect()
}

fn file_name(dir: &Path, path: &Path) -> String {
    path.strip_prefix(dir).unwrap_or(path).to_string_lossy().into_owned()
}

pub(crate) fn run(ctx: &Ctx, args: ScoreArgs) -> Result<Outcome, CliError> {
    let scorer_kind = require(args.scorer, "scorer")?;
    let default_model = match scorer_kind {
        ScorerKind::Mock => Some("mock".to_string()),
        ScorerKind::Ngram => Some(format!("ngram-{}", args.order.unwrap_or(3))),
        ScorerKind::Remote | ScorerKind::Import => None,
    };
    let cfg = ScoreConfig {
        suites: require(args.suites, "suites")?,
        scorer: scorer_kind,
        model: require(args.model.or(default_model), "model")?,
        endpoint: args.endpoint,
        mode: args.mode,
        corpus: args.corpus,
        order: args.order,
        smoothing: args.smoothing,
        from: args.from,
        batch_size: args.batch_size,
        suite_filter: args.suite_filter,
        out: require(args.out, "out")?,
        jobs: args.jobs,
    };
    existing_dir(&cfg.suites, "suite")?;
    if cfg.jobs == Some(0) || cfg.batch_size == Some(0) {
        return Err(CliError::Config("--jobs and --batch-size must be at least 1".into()));
    }
    let mut input_paths: Vec<&Path> = vec![&cfg.suites];
    if let Some(c) = &cfg.corpus {
        existing_file(c, "corpus")?;
        input_paths.push(c);
    }
    if let Some(f) = &cfg.from {
        existing_dir(f, "score")?;
        input_paths.push(f);
    }
    let inputs = digest_inputs(&input_paths)?;
    let suites = load_suites(&cfg.suites, &cfg.suite_filter)?;

    let outputs = if cfg.scorer == ScorerKind::Import {
        import_all(ctx, &cfg, &suites)?
    } else {
        let scorer = build_scorer(ctx, &cfg)?;
        score_all(ctx, &cfg, scorer.as_ref(), &suites)?
    };
    Ok(Outcome {
        out_dir: cfg.out.clone(),
        config: snapshot(&cfg),
        inputs,
        outputs,
        notes: Vec::new(),
    })
}

fn build_scorer(ctx: &Ctx, cfg: &ScoreConfig) -> Result<Box<dyn Scorer>, CliError> {
    Ok(match cfg.scorer {
        ScorerKind::Mock => Box::new(CharCountScorer {
            model_id: cfg.model.clone(),
        }),
        ScorerKind::Ngram => {
            let corpus_path = require(cfg.corpus.as_ref(), "corpus")?;
            let text = std::fs::read_to_string(corpus_path)
                .map_err(|e| CliError::Config(format!("{}: {e}", corpus_path.display())))?;
            let lines: Vec<&str> = text.lines().filter(|l| !l.trim().is_empty()).collect();
            let scorer = NgramScorer::train(&lines, cfg.order.unwrap_or(3), cfg.smoothing.unwrap_or(1.0))
                .map_err(|e| CliError::Config(e.to_string()))?
                .with_model_id(cfg.model.clone());
            Box::new(scorer)
        }
        ScorerKind::Remote => {
            let endpoint = require(cfg.endpoint.clone(), "endpoint")?;
            let mut rc = RemoteConfig::new(endpoint, cfg.model.clone(), mode(cfg.mode.unwrap_or(ModeArg::Causal)));
            if let Some(b) = cfg.batch_size {
                rc.batch_size = b;
            }
            let scorer = RemoteScorer::new(rc);
            let health = scorer
                .health()
                .map_err(|e| CliError::Transport(format!("scorer health check failed: {e}")))?;
            if !health.models_loaded.is_empty() && !health.models_loaded.contains(&cfg.model) {
                ctx.say(format!(
                    "warning: service reports models {:?}, not `{}`",
                    health.models_loaded, cfg.model
                ));
            }
            Box::new(scorer)
        }
        ScorerKind::Import => unreachable!("imports do not build a scorer"),
    })
}

fn score_all(ctx: &Ctx, cfg: &ScoreConfig, scorer: &dyn Scorer, suites: &[TestSuite]) -> Result<Vec<String>, CliError> {
    let info = scorer.info();
    let jobs = match cfg.jobs {
        Some(j) => j,
        None if info.single_threaded => 1,
        None => std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1),
    };
    let mut outputs = Vec::new();
    let mut failures = Vec::new();
    let mut scored_any = false;
    for suite in suites {
        match score_suite(scorer, suite, jobs) {
            Ok(scores) => {
                scored_any = true;
                outputs.extend(write(cfg, &scores)?);
                ctx.say(format!("{}: {}/{} correct", suite.name, scores.k_correct(), scores.n()));
            }
            Err(ScoringError::EmptySuite(name)) => {
                return Err(CliError::Data(format!("suite `{name}` has no pairs")));
            }
            Err(ScoringError::Partial {
                suite: name,
                total,
                failed,
                first,
                completed,
            }) => {
                scored_any |= !completed.scored.is_empty();
                ctx.say(format!("{name}: {} of {total} pairs failed: {first}", failed.len()));
                failures.push(SuiteFailure {
                    suite: name,
                    total,
                    failed: failed.len(),
                    transport: first.source.is_transport(),
                    first_error: first.to_string(),
                });
            }
        }
    }
    if failures.is_empty() {
        return Ok(outputs);
    }
    if !scored_any && failures.iter().all(|f| f.transport) {
        return Err(CliError::Transport(format!(
            "no pair could be scored: {}",
            failures[0].first_error
        )));
    }
    Err(CliError::Partial {
        message: format!(
            "{} of {} suites were not fully scored; their score files were not written",
            failures.len(),
            suites.len()
        ),
        failures,
    })
}

fn write(cfg: &ScoreConfig, scores: &SuiteScores) -> Result<Vec<String>, CliError> {
    let path = export_scores(scores, &cfg.out).map_err(|e| CliError::Io(e.to_string()))?;
    let meta = path.with_file_name(format!("{}{}", scores.suite_name, tse_core::scoring::file::META_SUFFIX));
    Ok(vec![file_name(&cfg.out, &path), file_name(&cfg.out, &meta)])
}

/// Validates score files produced elsewhere against the suites and copies
/// them into the output directory.
fn import_all(ctx: &Ctx, cfg: &ScoreConfig, suites: &[TestSuite]) -> Result<Vec<String>, CliError> {
    let from = require(cfg.from.as_ref(), "from")?;
    let mut outputs = Vec::new();
    for suite in suites {
        let path = score_file_path(from, &cfg.model, &suite.name);
        if !path.is_file() {
            return Err(CliError::Data(format!("missing score file {}", path.display())));
        }
        let scores = import_scores(&path).map_err(|e| CliError::Data(e.to_string()))?;
        if scores.suite_name != suite.name || scores.model_id != cfg.model {
            return Err(CliError::Data(format!(
                "{} holds {}/{}, expected {}/{}",
                path.display(),
                scores.model_id,
                scores.suite_name,
                cfg.model,
                suite.name
            )));
        }
        let ids: BTreeSet<u32> = suite.pairs.iter().map(|p| p.id).collect();
        check_pair_ids(&scores, &ids, &path).map_err(|e| CliError::Data(e.to_string()))?;
        outputs.extend(write(cfg, &scores)?);
        ctx.say(format!("{}: imported {} rows", suite.name, scores.n()));
    }
    Ok(outputs)
}
