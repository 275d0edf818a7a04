//! Targeted syntactic evaluation toolkit for Basque auxiliary agreement,
//! Hindi split ergativity and Swahili noun-class agreement.
//!
//! The crate is organised bottom-up:
//!
//! * [`lexicon`] loads annotated vocabularies,
//! * [`morphology`] realizes inflected forms from data tables,
//! * [`generator`] instantiates templates into minimal pairs and suites,
//! * [`scoring`] scores pairs through the [`scoring::Scorer`] boundary,
//! * [`analysis`] computes accuracies, binomial tests, slopes and
//!   complexity trends.

pub mod analysis;
pub mod bundle;
pub mod generator;
pub mod lang;
pub mod lexicon;
pub mod morphology;
pub mod resources;
pub mod scoring;
pub mod text;

pub use bundle::FeatureBundle;
pub use lang::{Category, Language};

/// Version string written into every manifest and report header.
pub const TOOL_VERSION: &str = concat!("tse ", env!("CARGO_PKG_VERSION"));

/// Directory holding the shipped lexicons, tables, templates and registry.
pub fn data_dir() -> std::path::PathBuf {
    std::path::PathBuf::from(concat!(env!("CARGO_MANIFEST_DIR"), "/data"))
}
