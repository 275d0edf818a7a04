//! File layout of lexicon, table, template and registry directories.

use std::collections::BTreeMap;
use std::path::{Path, PathBuf};

use crate::lang::Language;
use crate::lexicon::{load_lexicon, Lexicon, LexiconError, LoadOptions};
use crate::morphology::{Morphology, TableError};

pub const LEXICON_SUFFIX: &str = ".lexicon.json";
pub const TEMPLATE_SUFFIX: &str = ".template.json";

pub fn default_lexicon_dir() -> PathBuf {
    crate::data_dir().join("lexicons")
}

pub fn default_template_dir() -> PathBuf {
    crate::data_dir().join("templates")
}

pub fn default_registry_path() -> PathBuf {
    crate::data_dir().join("registry").join("models.json")
}

/// `<dir>/<language>.lexicon.json`
pub fn lexicon_path(lexicon_dir: &Path, language: Language) -> PathBuf {
    lexicon_dir.join(format!("{}{}", language.as_str(), LEXICON_SUFFIX))
}

#[derive(Debug, thiserror::Error)]
pub enum ResourceError {
    #[error("lexicon {path}: {source}")]
    Lexicon { path: PathBuf, source: LexiconError },
    #[error("inflection tables in {dir}: {source}")]
    Tables { dir: PathBuf, source: TableError },
}

/// Everything generation needs from a lexicon directory: one lexicon per
/// language plus the inflection tables stored alongside them.
#[derive(Debug, Clone)]
pub struct LanguageResources {
    pub lexicons: BTreeMap<Language, Lexicon>,
    pub morphology: Morphology,
}

impl LanguageResources {
    pub fn load(lexicon_dir: &Path, opts: LoadOptions) -> Result<Self, ResourceError> {
        let mut lexicons = BTreeMap::new();
        for language in Language::ALL {
            let path = lexicon_path(lexicon_dir, language);
            let lexicon = load_lexicon(&path, opts).map_err(|source| ResourceError::Lexicon { path, source })?;
            lexicons.insert(language, lexicon);
        }
        let morphology = Morphology::load_dir(lexicon_dir).map_err(|source| ResourceError::Tables {
            dir: lexicon_dir.to_path_buf(),
            source,
        })?;
        Ok(Self { lexicons, morphology })
    }

    pub fn lexicon(&self, language: Language) -> &Lexicon {
        &self.lexicons[&language]
    }
}
