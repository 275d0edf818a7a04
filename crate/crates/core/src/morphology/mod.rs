//! Deterministic inflection over data tables.
//!
//! Listed forms in a lexical entry always win; otherwise a rule engine
//! for the entry's (language, category) realizes the bundle:
//!
//! | language | category  | bundle                              | engine          |
//! |----------|-----------|-------------------------------------|-----------------|
//! | basque   | noun      | `case`, `number`                    | case suffixes   |
//! | swahili  | noun      | `noun_class`                        | noun prefix     |
//! | swahili  | adjective | `noun_class`                        | adjective concord |
//! | swahili  | verb      | `noun_class`, `relative`, `tense`   | past verb       |
//!
//! Hindi has no rule engine: all of its forms are listed.

pub mod basque;
pub mod swahili;

use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::bundle::FeatureBundle;
use crate::lang::{Category, Language};
use crate::lexicon::LexicalEntry;

pub use basque::{BasqueAuxKey, BasqueAuxTable, BasqueCaseTable, Case, CaseSpec, Paradigm, StemFinal, Tense};
pub use swahili::{ConcordSlotKind, ConcordTable, SwahiliConcordSlot};

pub const TABLE_SCHEMA_VERSION: u32 = 1;

/// Swahili past-tense marker used by verb realization.
pub const SWAHILI_PAST: &str = "li";

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Number {
    Sg,
    Pl,
}

impl Number {
    pub const ALL: [Number; 2] = [Number::Sg, Number::Pl];

    pub fn as_str(self) -> &'static str {
        match self {
            Number::Sg => "sg",
            Number::Pl => "pl",
        }
    }

    pub fn parse(s: &str) -> Option<Number> {
        match s {
            "sg" => Some(Number::Sg),
            "pl" => Some(Number::Pl),
            _ => None,
        }
    }

    pub fn flipped(self) -> Number {
        match self {
            Number::Sg => Number::Pl,
            Number::Pl => Number::Sg,
        }
    }
}

impl fmt::Display for Number {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum TableError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed table document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("expected a `{expected}` table (schema {TABLE_SCHEMA_VERSION}), found `{found}` (schema {version})")]
    Header {
        expected: &'static str,
        found: String,
        version: u32,
    },
    #[error("invalid table: {}", .0.join("; "))]
    Invalid(Vec<String>),
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum MorphologyError {
    #[error("{entry} is not {expected}")]
    WrongEntry { expected: &'static str, entry: String },
    #[error("{entry} lacks feature `{feature}`")]
    MissingFeature { entry: String, feature: String },
    #[error("auxiliary table has no form for {0}")]
    MissingAuxForm(String),
    #[error("concord table has no entry for {0}")]
    MissingConcord(SwahiliConcordSlot),
    #[error("no concord rule for {slot} applies to stem `{stem}`")]
    NoConcordRule { slot: SwahiliConcordSlot, stem: String },
    #[error("invalid bundle `{bundle}` for {entry}: {reason}")]
    InvalidBundle {
        entry: String,
        bundle: String,
        reason: String,
    },
    #[error("{entry} has no form for `{bundle}` and no rule covers it")]
    NoForm { entry: String, bundle: String },
}

fn check_header(version: u32, found: &str, expected: &'static str) -> Result<(), TableError> {
    if version == TABLE_SCHEMA_VERSION && found == expected {
        Ok(())
    } else {
        Err(TableError::Header {
            expected,
            found: found.to_string(),
            version,
        })
    }
}

/// File names of the tables inside a lexicon directory.
pub const BASQUE_CASE_FILE: &str = "basque_case.table.json";
pub const BASQUE_AUX_FILE: &str = "basque_auxiliary.table.json";
pub const SWAHILI_CONCORD_FILE: &str = "swahili_concord.table.json";

/// All inflection tables. Immutable after load.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Morphology {
    pub basque_case: BasqueCaseTable,
    pub basque_aux: BasqueAuxTable,
    pub swahili_concord: ConcordTable,
}

fn read(path: &Path) -> Result<String, TableError> {
    std::fs::read_to_string(path).map_err(|source| TableError::Io {
        path: path.to_path_buf(),
        source,
    })
}

impl Morphology {
    pub fn load_dir(dir: impl AsRef<Path>) -> Result<Self, TableError> {
        let dir = dir.as_ref();
        Ok(Self {
            basque_case: BasqueCaseTable::from_json_str(&read(&dir.join(BASQUE_CASE_FILE))?)?,
            basque_aux: BasqueAuxTable::from_json_str(&read(&dir.join(BASQUE_AUX_FILE))?)?,
            swahili_concord: ConcordTable::from_json_str(&read(&dir.join(SWAHILI_CONCORD_FILE))?)?,
        })
    }

    pub fn basque_case_mark(&self, entry: &LexicalEntry, spec: CaseSpec) -> Result<String, MorphologyError> {
        self.basque_case.case_mark(entry, spec)
    }

    pub fn basque_auxiliary(&self, key: &BasqueAuxKey) -> Result<String, MorphologyError> {
        if !key.is_well_formed() {
            return Err(MorphologyError::InvalidBundle {
                entry: "auxiliary".into(),
                bundle: key.to_string(),
                reason: "argument numbers do not match the paradigm".into(),
            });
        }
        self.basque_aux.lookup(key).map(str::to_string)
    }

    pub fn swahili_concord(&self, slot: SwahiliConcordSlot, stem: &str) -> Result<String, MorphologyError> {
        self.swahili_concord.concord(slot, stem)
    }

    /// Realizes `bundle` for `entry`: listed form first, then rules.
    pub fn inflect(&self, entry: &LexicalEntry, bundle: &FeatureBundle) -> Result<String, MorphologyError> {
        if let Some(form) = entry.form(bundle) {
            return Ok(form.to_string());
        }
        let invalid = |reason: &str| MorphologyError::InvalidBundle {
            entry: entry.to_string(),
            bundle: bundle.key(),
            reason: reason.to_string(),
        };
        match (entry.language, entry.category) {
            (Language::Basque, Category::Noun) => {
                only(bundle, &["case", "number"]).map_err(|r| invalid(&r))?;
                let case = bundle.get("case").and_then(Case::parse);
                let number = bundle.get("number").and_then(Number::parse);
                match (case, number) {
                    (Some(case), Some(number)) => self.basque_case_mark(entry, CaseSpec::new(case, number)),
                    _ => Err(invalid("needs case and number")),
                }
            }
            (Language::Swahili, Category::Noun | Category::Adjective) => {
                only(bundle, &["noun_class"]).map_err(|r| invalid(&r))?;
                let class = noun_class(bundle).ok_or_else(|| invalid("needs noun_class"))?;
                let kind = if entry.category == Category::Noun {
                    ConcordSlotKind::NounPrefix
                } else {
                    ConcordSlotKind::AdjectivePrefix
                };
                self.swahili_concord(SwahiliConcordSlot::new(kind, class), &entry.lemma)
            }
            (Language::Swahili, Category::Verb) => {
                only(bundle, &["noun_class", "relative", "tense"]).map_err(|r| invalid(&r))?;
                let class = noun_class(bundle).ok_or_else(|| invalid("needs noun_class"))?;
                if bundle.get("tense") != Some("past") {
                    return Err(invalid("only tense=past is realized"));
                }
                let relative = match bundle.get("relative") {
                    Some("yes") => true,
                    Some("no") | None => false,
                    Some(_) => return Err(invalid("relative must be yes or no")),
                };
                self.swahili_concord
                    .past_verb(class, SWAHILI_PAST, &entry.lemma, relative)
            }
            _ => Err(MorphologyError::NoForm {
                entry: entry.to_string(),
                bundle: bundle.key(),
            }),
        }
    }
}

/// Class a Swahili noun triggers on its agreement targets. Animate nouns
/// outside classes 1/2 (e.g. class-10 `mbwa` "dogs") carry an explicit
/// `agreement_class`; everything else agrees in its own class.
pub fn swahili_agreement_class(entry: &LexicalEntry) -> Result<u8, MorphologyError> {
    if entry.language != Language::Swahili || entry.category != Category::Noun {
        return Err(MorphologyError::WrongEntry {
            expected: "a Swahili noun",
            entry: entry.to_string(),
        });
    }
    entry
        .feature("agreement_class")
        .or_else(|| entry.feature("noun_class"))
        .and_then(|c| c.parse().ok())
        .ok_or_else(|| MorphologyError::MissingFeature {
            entry: entry.to_string(),
            feature: "noun_class".into(),
        })
}

fn only(bundle: &FeatureBundle, allowed: &[&str]) -> Result<(), String> {
    match bundle.iter().find(|(k, _)| !allowed.contains(k)) {
        Some((k, _)) => Err(format!("unexpected feature `{k}`")),
        None => Ok(()),
    }
}

fn noun_class(bundle: &FeatureBundle) -> Option<u8> {
    bundle
        .get("noun_class")
        .and_then(|c| c.parse().ok())
        .filter(|c| (1..=18).contains(c))
}

#[cfg(test)]
mod tests;
