use std::fmt::Write as _;
use std::path::PathBuf;

use serde::Serialize;
use serde_json::json;
use tse_core::generator::{import_suite, list_suites, sample_validation_subset};

use crate::args::SampleArgs;
use crate::manifest::digest_inputs;
use crate::{existing_dir, require, snapshot, CliError, Ctx, Outcome};

pub const SAMPLE_FILE: &str = "sample.jsonl";
pub const KEY_FILE: &str = "key.jsonl";

#[derive(Debug, Serialize)]
struct SampleConfig {
    suites: PathBuf,
    per_suite: usize,
    seed: u64,
    suite_filter: Vec<String>,
    out: PathBuf,
}

/// Writes the annotator sheet (sentences only) and a separate answer key.
pub(crate) fn run(ctx: &Ctx, args: SampleArgs) -> Result<Outcome, CliError> {
    let cfg = SampleConfig {
        suites: require(args.suites, "suites")?,
        per_suite: args.per_suite.unwrap_or(5),
        seed: require(args.seed, "seed")?,
        suite_filter: args.suite_filter,
        out: require(args.out, "out")?,
    };
    existing_dir(&cfg.suites, "suite")?;
    let inputs = digest_inputs(&[&cfg.suites])?;
    let mut names = list_suites(&cfg.suites).map_err(|e| CliError::Data(e.to_string()))?;
    if !cfg.suite_filter.is_empty() {
        if let Some(f) = cfg.suite_filter.iter().find(|f| !names.contains(f)) {
            return Err(CliError::Config(format!(
                "suite `{f}` not found in {}",
                cfg.suites.display()
            )));
        }
        names = cfg.suite_filter.clone();
    }
    let suites = names
        .iter()
        .map(|n| import_suite(&cfg.suites, n).map_err(|e| CliError::Data(e.to_string())))
        .collect::<Result<Vec<_>, _>>()?;
    let items =
        sample_validation_subset(&suites, cfg.per_suite, cfg.seed).map_err(|e| CliError::Data(e.to_string()))?;

    let (mut sheet, mut key) = (String::new(), String::new());
    for (i, it) in items.iter().enumerate() {
        let _ = writeln!(
            sheet,
            "{}",
            json!({"item": i, "sentence_a": it.sentence_a, "sentence_b": it.sentence_b})
        );
        let _ = writeln!(
            key,
            "{}",
            json!({"item": i, "suite": it.suite, "pair_id": it.pair_id, "grammatical": it.grammatical})
        );
    }
    std::fs::create_dir_all(&cfg.out).map_err(|e| CliError::Io(format!("{}: {e}", cfg.out.display())))?;
    for (name, text) in [(SAMPLE_FILE, &sheet), (KEY_FILE, &key)] {
        let path = cfg.out.join(name);
        std::fs::write(&path, text).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
    }
    ctx.say(format!("sampled {} items from {} suites", items.len(), suites.len()));
    Ok(Outcome {
        out_dir: cfg.out.clone(),
        config: snapshot(&cfg),
        inputs,
        outputs: vec![SAMPLE_FILE.into(), KEY_FILE.into()],
        notes: Vec::new(),
    })
}
