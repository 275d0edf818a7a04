//! The `tse` pipeline: `generate`, `score`, `analyze` and
//! `validate-sample`, each writing a run manifest next to its outputs.
//!
//! Exit codes: 0 success, 1 I/O failure, 2 configuration error, 3 invalid
//! data, 4 scorer unreachable, 5 some pairs could not be scored.

mod analyze;
pub mod args;
mod error;
mod generate;
pub mod manifest;
mod sample;
mod score;

use std::path::{Path, PathBuf};

use clap::Parser;
use serde::Serialize;

pub use args::{Cli, Command, ConfigFile};
pub use error::{CliError, SuiteFailure};
use manifest::{now_unix, InputDigest, RunManifest};

/// What a finished command hands back for its manifest.
pub(crate) struct Outcome {
    pub out_dir: PathBuf,
    pub config: serde_json::Value,
    pub inputs: Vec<InputDigest>,
    pub outputs: Vec<String>,
    pub notes: Vec<String>,
}

pub(crate) struct Ctx {
    pub quiet: bool,
}

impl Ctx {
    pub fn say(&self, msg: impl AsRef<str>) {
        if !self.quiet {
            eprintln!("{}", msg.as_ref());
        }
    }
}

pub(crate) fn snapshot<T: Serialize>(v: &T) -> serde_json::Value {
    serde_json::to_value(v).expect("config serializes")
}

pub(crate) fn require<T>(v: Option<T>, flag: &str) -> Result<T, CliError> {
    v.ok_or_else(|| CliError::Config(format!("missing required option --{flag}")))
}

pub(crate) fn existing_dir(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_dir() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{what} directory {} does not exist",
            path.display()
        )))
    }
}

pub(crate) fn existing_file(path: &Path, what: &str) -> Result<(), CliError> {
    if path.is_file() {
        Ok(())
    } else {
        Err(CliError::Config(format!(
            "{what} file {} does not exist",
            path.display()
        )))
    }
}

pub(crate) fn thread_pool(jobs: Option<usize>) -> Result<rayon::ThreadPool, CliError> {
    if jobs == Some(0) {
        return Err(CliError::Config("--jobs must be at least 1".into()));
    }
    rayon::ThreadPoolBuilder::new()
        .num_threads(jobs.unwrap_or(0))
        .build()
        .map_err(|e| CliError::Io(format!("thread pool: {e}")))
}

fn load_config(path: Option<&Path>) -> Result<ConfigFile, CliError> {
    let Some(path) = path else {
        return Ok(ConfigFile::default());
    };
    let text = std::fs::read_to_string(path).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
}

/// Output directory named on the command line or in the config, if any,
/// so that failures can still leave a manifest behind.
fn intended_out(cli: &Cli, config: &ConfigFile) -> Option<PathBuf> {
    match &cli.command {
        Command::Generate(a) => a.out.clone().or_else(|| config.generate.out.clone()),
        Command::Score(a) => a.out.clone().or_else(|| config.score.out.clone()),
        Command::Analyze(a) => a.out.clone().or_else(|| config.analyze.out.clone()),
        Command::ValidateSample(a) => a.out.clone().or_else(|| config.validate_sample.out.clone()),
    }
}

/// Parses `argv` (program name first) and runs the command. Returns the
/// process exit code; errors are summarized as JSON on stderr.
pub fn run<I, S>(argv: I) -> u8
where
    I: IntoIterator<Item = S>,
    S: Into<std::ffi::OsString> + Clone,
{
    let argv: Vec<std::ffi::OsString> = argv.into_iter().map(Into::into).collect();
    let cli = match Cli::try_parse_from(&argv) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return code;
        }
    };
    let argv: Vec<String> = argv.iter().map(|a| a.to_string_lossy().into_owned()).collect();
    let started = now_unix();
    let command = cli.command.name();

    let config = match load_config(cli.config.as_deref()) {
        Ok(c) => c,
        Err(e) => return report_error(&e, None, command, &argv, started),
    };
    let out_hint = intended_out(&cli, &config);
    let ctx = Ctx { quiet: cli.quiet };
    let result = match cli.command {
        Command::Generate(a) => generate::run(&ctx, a.merged(config.generate)),
        Command::Score(a) => score::run(&ctx, a.merged(config.score)),
        Command::Analyze(a) => analyze::run(&ctx, a.merged(config.analyze)),
        Command::ValidateSample(a) => sample::run(&ctx, a.merged(config.validate_sample)),
    };
    match result {
        Ok(outcome) => {
            let manifest = RunManifest {
                command: command.into(),
                tool_version: tse_core::TOOL_VERSION.into(),
                argv,
                config: outcome.config,
                inputs: outcome.inputs,
                outputs: outcome.outputs,
                notes: outcome.notes,
                status: "ok".into(),
                exit_code: 0,
                error: None,
                started_unix: started,
                finished_unix: now_unix(),
            };
            match manifest.write(&outcome.out_dir) {
                Ok(_) => 0,
                Err(e) => report_error(&e, None, command, &manifest.argv, started),
            }
        }
        Err(e) => report_error(&e, out_hint.as_deref(), command, &argv, started),
    }
}

fn report_error(e: &CliError, out: Option<&Path>, command: &str, argv: &[String], started: u64) -> u8 {
    let summary = e.summary();
    eprintln!("{summary}");
    // Leave a record in an existing output directory; never create one
    // just to hold a failure.
    if let Some(dir) = out.filter(|d| d.is_dir()) {
        let manifest = RunManifest {
            command: command.into(),
            tool_version: tse_core::TOOL_VERSION.into(),
            argv: argv.to_vec(),
            config: serde_json::Value::Null,
            inputs: Vec::new(),
            outputs: Vec::new(),
            notes: Vec::new(),
            status: "failed".into(),
            exit_code: e.exit_code(),
            error: Some(summary),
            started_unix: started,
            finished_unix: now_unix(),
        };
        let _ = manifest.write(dir);
    }
    e.exit_code()
}
