//! Annotated per-language vocabularies.
//!
//! A lexicon document is JSON:
//!
//! ```json
//! {
//!   "schema_version": 1,
//!   "language": "swahili",
//!   "version": "1.0.0",
//!   "features": { "noun": ["animacy", "noun_class", "semantic_class"] },
//!   "inflection": { "noun": ["noun_class"] },
//!   "entries": [
//!     { "lemma": "umba", "category": "noun", "gloss": "house",
//!       "features": { "animacy": "inanimate", "noun_class": "10", "semantic_class": "building" },
//!       "forms": { "noun_class=10": "nyumba" } }
//!   ]
//! }
//! ```
//!
//! `features` closes the lexical feature vocabulary per category and
//! `inflection` closes the feature names allowed in `forms` keys. Both are
//! enforced at load time.

mod doc;
mod validate;

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use crate::bundle::FeatureBundle;
use crate::lang::{Category, Language};

pub use validate::{Rule, ValidationIssue};

pub const LEXICON_SCHEMA_VERSION: u32 = 1;

/// Feature-name → admissible values. An empty constraint map matches every
/// entry of the category.
pub type Constraints = BTreeMap<String, BTreeSet<String>>;

#[derive(Debug, thiserror::Error)]
pub enum LexiconError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed lexicon document: {0}")]
    Parse(#[from] serde_json::Error),
    #[error("unsupported lexicon schema version {0}")]
    SchemaVersion(u32),
    #[error("lexicon failed validation:\n{}", format_issues(.0))]
    Validation(Vec<ValidationIssue>),
    #[error("feature `{feature}` is not declared for category `{category}`")]
    UnknownFeature { feature: String, category: Category },
}

fn format_issues(issues: &[ValidationIssue]) -> String {
    issues.iter().map(|i| format!("  {i}")).collect::<Vec<_>>().join("\n")
}

#[derive(Debug, Clone, Copy, Default)]
pub struct LoadOptions {
    /// NFC-normalize text instead of rejecting non-normalized input.
    pub normalize: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LexicalEntry {
    pub language: Language,
    pub lemma: String,
    pub category: Category,
    pub gloss: Option<String>,
    pub features: BTreeMap<String, String>,
    /// Canonical bundle key → surface form.
    pub forms: BTreeMap<String, String>,
}

impl LexicalEntry {
    pub fn feature(&self, name: &str) -> Option<&str> {
        self.features.get(name).map(String::as_str)
    }

    pub fn form(&self, bundle: &FeatureBundle) -> Option<&str> {
        self.forms.get(&bundle.key()).map(String::as_str)
    }
}

impl fmt::Display for LexicalEntry {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}:{}", self.language, self.category, self.lemma)
    }
}

/// Closed feature vocabulary declared in the lexicon header.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct FeatureSchema {
    pub lexical: BTreeMap<Category, BTreeSet<String>>,
    pub inflection: BTreeMap<Category, BTreeSet<String>>,
}

impl FeatureSchema {
    pub fn allows_lexical(&self, category: Category, feature: &str) -> bool {
        self.lexical.get(&category).is_some_and(|names| names.contains(feature))
    }

    pub fn allows_inflection(&self, category: Category, feature: &str) -> bool {
        self.inflection
            .get(&category)
            .is_some_and(|names| names.contains(feature))
    }
}

/// An immutable, validated vocabulary for one language.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Lexicon {
    pub language: Language,
    pub version: String,
    pub schema: FeatureSchema,
    entries: Vec<LexicalEntry>,
}

impl Lexicon {
    pub fn from_json_str(text: &str, opts: LoadOptions) -> Result<Self, LexiconError> {
        let doc: doc::LexiconDoc = serde_json::from_str(text)?;
        if doc.schema_version != LEXICON_SCHEMA_VERSION {
            return Err(LexiconError::SchemaVersion(doc.schema_version));
        }
        validate::build(doc, opts)
    }

    /// Builds a lexicon from already-constructed entries, running the same
    /// validation as [`load_lexicon`].
    pub fn from_entries(
        language: Language,
        version: impl Into<String>,
        schema: FeatureSchema,
        entries: Vec<LexicalEntry>,
    ) -> Result<Self, LexiconError> {
        let lexicon = Lexicon {
            language,
            version: version.into(),
            schema,
            entries,
        };
        let issues = validate::check(&lexicon);
        if issues.is_empty() {
            Ok(lexicon)
        } else {
            Err(LexiconError::Validation(issues))
        }
    }

    pub fn entries(&self) -> &[LexicalEntry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn get(&self, category: Category, lemma: &str) -> Option<&LexicalEntry> {
        self.entries.iter().find(|e| e.category == category && e.lemma == lemma)
    }

    /// Entries of `category` satisfying every constraint, in load order.
    pub fn query_entries(
        &self,
        category: Category,
        constraints: &Constraints,
    ) -> Result<Vec<&LexicalEntry>, LexiconError> {
        if let Some(unknown) = constraints
            .keys()
            .find(|name| !self.schema.allows_lexical(category, name))
        {
            return Err(LexiconError::UnknownFeature {
                feature: unknown.clone(),
                category,
            });
        }
        Ok(self
            .entries
            .iter()
            .filter(|e| e.category == category)
            .filter(|e| {
                constraints
                    .iter()
                    .all(|(name, allowed)| e.features.get(name).is_some_and(|v| allowed.contains(v)))
            })
            .collect())
    }

    /// Canonical JSON rendering; `load(export(l)) == l`.
    pub fn export(&self) -> String {
        let doc = doc::LexiconDoc::from_lexicon(self);
        let mut out = serde_json::to_string_pretty(&doc).expect("lexicon serializes");
        out.push('\n');
        out
    }
}

pub fn load_lexicon(path: impl AsRef<Path>, opts: LoadOptions) -> Result<Lexicon, LexiconError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| LexiconError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Lexicon::from_json_str(&text, opts)
}
