//! Command-line grammar. Every option can also come from the matching
//! section of a `--config` JSON file; flags given on the command line win.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

#[derive(Debug, Parser)]
#[command(
    name = "tse",
    version,
    about = "Generate, score and analyze agreement minimal-pair suites"
)]
pub struct Cli {
    /// JSON file with a section per subcommand, e.g. {"generate": {"seed": 42}}.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,

    /// Only print errors.
    #[arg(short, long, global = true)]
    pub quiet: bool,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Instantiate templates into minimal-pair suites.
    Generate(GenerateArgs),
    /// Score suites with a local or remote scorer, or import score files.
    Score(ScoreArgs),
    /// Accuracy matrix, size slopes, complexity trends and language averages.
    Analyze(AnalyzeArgs),
    /// Blinded pair sample for native-speaker checks.
    ValidateSample(SampleArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Generate(_) => "generate",
            Command::Score(_) => "score",
            Command::Analyze(_) => "analyze",
            Command::ValidateSample(_) => "validate-sample",
        }
    }
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct GenerateArgs {
    /// Template directory [default: shipped templates]
    #[arg(long)]
    pub templates: Option<PathBuf>,
    /// Lexicon and inflection-table directory [default: shipped lexicons]
    #[arg(long)]
    pub lexicons: Option<PathBuf>,
    /// Run seed (required)
    #[arg(long)]
    pub seed: Option<u64>,
    /// Pairs per suite [default: 1000]
    #[arg(long)]
    pub n: Option<usize>,
    /// Only these suites (repeatable)
    #[arg(long = "suite")]
    pub suites: Vec<String>,
    /// Also generate suites whose templates are marked unvalidated
    #[arg(long)]
    pub include_unvalidated: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads [default: logical cores]
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ScorerKind {
    /// Target character count, negated; needs no model.
    Mock,
    /// Add-k word n-gram trained on `--corpus`.
    Ngram,
    /// HTTP scoring service at `--endpoint`.
    Remote,
    /// Existing score files under `--from`.
    Import,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModeArg {
    Causal,
    #[value(name = "masked_pll")]
    MaskedPll,
    Mock,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScoreArgs {
    #[arg(long)]
    pub suites: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub scorer: Option<ScorerKind>,
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Model id written into score files
    #[arg(long)]
    pub model: Option<String>,
    #[arg(long, value_enum)]
    pub mode: Option<ModeArg>,
    /// Training text for the n-gram scorer, one sentence per line
    #[arg(long)]
    pub corpus: Option<PathBuf>,
    /// N-gram order [default: 3]
    #[arg(long)]
    pub order: Option<usize>,
    /// Add-k smoothing constant [default: 1]
    #[arg(long)]
    pub smoothing: Option<f64>,
    /// Directory of score files for `--scorer import`
    #[arg(long)]
    pub from: Option<PathBuf>,
    /// Items per request for the remote scorer [default: 64]
    #[arg(long)]
    pub batch_size: Option<usize>,
    #[arg(long = "suite")]
    pub suite_filter: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Concurrent batches [default: logical cores, 1 for single-threaded scorers]
    #[arg(long)]
    pub jobs: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ReportKind {
    Matrix,
    Slopes,
    Complexity,
    Averages,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AnalyzeArgs {
    #[arg(long)]
    pub scores: Option<PathBuf>,
    /// Model registry [default: shipped registry]
    #[arg(long)]
    pub registry: Option<PathBuf>,
    /// Suite directory; checks pair ids and records the generation seed
    #[arg(long)]
    pub suites: Option<PathBuf>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Reports to write (repeatable) [default: all that the data supports]
    #[arg(long = "report", value_enum)]
    pub reports: Vec<ReportKind>,
}

#[derive(Debug, Clone, Default, Args, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SampleArgs {
    #[arg(long)]
    pub suites: Option<PathBuf>,
    /// Pairs drawn from each suite [default: 5]
    #[arg(long)]
    pub per_suite: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "suite")]
    pub suite_filter: Vec<String>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// `--config` file layout.
#[derive(Debug, Default, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ConfigFile {
    pub generate: GenerateArgs,
    pub score: ScoreArgs,
    pub analyze: AnalyzeArgs,
    #[serde(rename = "validate-sample")]
    pub validate_sample: SampleArgs,
}

fn pick<T>(flag: Option<T>, file: Option<T>) -> Option<T> {
    flag.or(file)
}

fn pick_vec<T>(flag: Vec<T>, file: Vec<T>) -> Vec<T> {
    if flag.is_empty() {
        file
    } else {
        flag
    }
}

impl GenerateArgs {
    pub fn merged(self, file: GenerateArgs) -> Self {
        Self {
            templates: pick(self.templates, file.templates),
            lexicons: pick(self.lexicons, file.lexicons),
            seed: pick(self.seed, file.seed),
            n: pick(self.n, file.n),
            suites: pick_vec(self.suites, file.suites),
            include_unvalidated: self.include_unvalidated || file.include_unvalidated,
            out: pick(self.out, file.out),
            jobs: pick(self.jobs, file.jobs),
        }
    }
}

impl ScoreArgs {
    pub fn merged(self, file: ScoreArgs) -> Self {
        Self {
            suites: pick(self.suites, file.suites),
            scorer: pick(self.scorer, file.scorer),
            endpoint: pick(self.endpoint, file.endpoint),
            model: pick(self.model, file.model),
            mode: pick(self.mode, file.mode),
            corpus: pick(self.corpus, file.corpus),
            order: pick(self.order, file.order),
            smoothing: pick(self.smoothing, file.smoothing),
            from: pick(self.from, file.from),
            batch_size: pick(self.batch_size, file.batch_size),
            suite_filter: pick_vec(self.suite_filter, file.suite_filter),
            out: pick(self.out, file.out),
            jobs: pick(self.jobs, file.jobs),
        }
    }
}

impl AnalyzeArgs {
    pub fn merged(self, file: AnalyzeArgs) -> Self {
        Self {
            scores: pick(self.scores, file.scores),
            registry: pick(self.registry, file.registry),
            suites: pick(self.suites, file.suites),
            out: pick(self.out, file.out),
            reports: pick_vec(self.reports, file.reports),
        }
    }
}

impl SampleArgs {
    pub fn merged(self, file: SampleArgs) -> Self {
        Self {
            suites: pick(self.suites, file.suites),
            per_suite: pick(self.per_suite, file.per_suite),
            seed: pick(self.seed, file.seed),
            suite_filter: pick_vec(self.suite_filter, file.suite_filter),
            out: pick(self.out, file.out),
        }
    }
}
