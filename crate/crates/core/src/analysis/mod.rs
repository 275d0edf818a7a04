//! Accuracy with confidence intervals, one-sided binomial tests, size
//! regressions and intervening-content trends.

pub mod registry;
pub mod report;
pub mod stats;
pub mod tables;

pub use registry::{default_registry_path, load_registry, Architecture, ModelInfo, RegistryError, REGRESSION_FAMILIES};
pub use report::{
    accuracy_from_counts, accuracy_report, complexity_delta, complexity_key, complexity_steps, complexity_trends,
    language_averages, slope_table, AnalysisError, ComplexityDelta, ComplexityKey, LanguageAverage, ResultsMatrix,
    SlopeRow, SlopeTable, SuiteResult, TrendPoint, ALPHA,
};
pub use stats::{
    binomial_p, fit_slope, ln_binomial_p, mean_sem, wilson, MeanInterval, RegressionFit, StatsError, Tail,
    SEM_MULTIPLIER, Z95,
};
pub use tables::ReportMeta;
