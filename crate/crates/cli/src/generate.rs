use std::path::PathBuf;
use std::time::Instant;

use serde::Serialize;
use tse_core::generator::export::manifest_path;
use tse_core::generator::{audit_suite, export_suite, load_templates, suite_seed, Generator, Template};
use tse_core::lexicon::LoadOptions;
use tse_core::resources::{default_lexicon_dir, default_template_dir, LanguageResources};

use crate::args::GenerateArgs;
use crate::manifest::digest_inputs;
use crate::{existing_dir, require, snapshot, thread_pool, CliError, Ctx, Outcome};

pub const DEFAULT_PAIRS: usize = 1000;

#[derive(Debug, Serialize)]
struct GenerateConfig {
    templates: PathBuf,
    lexicons: PathBuf,
    seed: u64,
    n: usize,
    suites: Vec<String>,
    include_unvalidated: bool,
    out: PathBuf,
    jobs: Option<usize>,
}

pub(crate) fn run(ctx: &Ctx, args: GenerateArgs) -> Result<Outcome, CliError> {
    let cfg = GenerateConfig {
        templates: args.templates.unwrap_or_else(default_template_dir),
        lexicons: args.lexicons.unwrap_or_else(default_lexicon_dir),
        seed: require(args.seed, "seed")?,
        n: args.n.unwrap_or(DEFAULT_PAIRS),
        suites: args.suites,
        include_unvalidated: args.include_unvalidated,
        out: require(args.out, "out")?,
        jobs: args.jobs,
    };
    existing_dir(&cfg.templates, "template")?;
    existing_dir(&cfg.lexicons, "lexicon")?;
    if cfg.n == 0 {
        return Err(CliError::Config("--n must be at least 1".into()));
    }
    let pool = thread_pool(cfg.jobs)?;
    let inputs = digest_inputs(&[&cfg.templates, &cfg.lexicons])?;

    let templates = load_templates(&cfg.templates).map_err(|e| CliError::Data(e.to_string()))?;
    let chosen: Vec<&Template> = if cfg.suites.is_empty() {
        templates
            .iter()
            .filter(|t| t.validated || cfg.include_unvalidated)
            .collect()
    } else {
        let mut v = Vec::new();
        for name in &cfg.suites {
            let t = templates
                .iter()
                .find(|t| t.suite_name == *name)
                .ok_or_else(|| CliError::Config(format!("no template for suite `{name}`")))?;
            v.push(t);
        }
        v
    };
    if chosen.is_empty() {
        return Err(CliError::Config(format!(
            "no templates selected in {}",
            cfg.templates.display()
        )));
    }
    let resources =
        LanguageResources::load(&cfg.lexicons, LoadOptions::default()).map_err(|e| CliError::Data(e.to_string()))?;

    let start = Instant::now();
    let mut outputs = Vec::new();
    for t in chosen {
        let generator = Generator::new(t, resources.lexicon(t.language), &resources.morphology)
            .map_err(|e| CliError::Data(e.to_string()))?;
        let seed = suite_seed(cfg.seed, &t.suite_name);
        let suite = pool
            .install(|| generator.generate_suite(seed, cfg.n))
            .map_err(|e| CliError::Data(e.to_string()))?;
        let failures = audit_suite(&suite);
        if let Some(first) = failures.first() {
            return Err(CliError::Data(format!(
                "suite `{}` failed {} audit checks, first: {first}",
                suite.name,
                failures.len()
            )));
        }
        let path = export_suite(&suite, &cfg.out).map_err(|e| CliError::Io(e.to_string()))?;
        ctx.say(format!("{}: {} pairs", suite.name, suite.pairs.len()));
        for p in [path, manifest_path(&cfg.out, &suite.name)] {
            outputs.push(p.file_name().expect("file path").to_string_lossy().into_owned());
        }
    }
    ctx.say(format!(
        "generated {} suites in {:.1}s",
        outputs.len() / 2,
        start.elapsed().as_secs_f64()
    ));
    Ok(Outcome {
        out_dir: cfg.out.clone(),
        config: snapshot(&cfg),
        inputs,
        outputs,
        notes: Vec::new(),
    })
}
