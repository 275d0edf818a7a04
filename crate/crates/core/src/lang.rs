use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Language {
    Basque,
    Hindi,
    Swahili,
}

impl Language {
    pub const ALL: [Language; 3] = [Language::Basque, Language::Hindi, Language::Swahili];

    pub fn as_str(self) -> &'static str {
        match self {
            Language::Basque => "basque",
            Language::Hindi => "hindi",
            Language::Swahili => "swahili",
        }
    }

    /// Sentence-final punctuation, attached to the last word.
    pub fn full_stop(self) -> &'static str {
        match self {
            Language::Hindi => "\u{0964}",
            Language::Basque | Language::Swahili => ".",
        }
    }

    /// Whether the first letter of a sentence is upper-cased.
    pub fn capitalizes(self) -> bool {
        !matches!(self, Language::Hindi)
    }

    /// Language of a suite, read from its name prefix (`basque-...`).
    pub fn from_suite_name(name: &str) -> Option<Language> {
        let prefix = name.split('-').next()?;
        prefix.parse().ok()
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Language {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "basque" => Ok(Language::Basque),
            "hindi" => Ok(Language::Hindi),
            "swahili" => Ok(Language::Swahili),
            other => Err(format!("unknown language `{other}`")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Category {
    Noun,
    Verb,
    Adjective,
    Demonstrative,
    PossessivePronoun,
    Auxiliary,
    Particle,
}

impl Category {
    pub fn as_str(self) -> &'static str {
        match self {
            Category::Noun => "noun",
            Category::Verb => "verb",
            Category::Adjective => "adjective",
            Category::Demonstrative => "demonstrative",
            Category::PossessivePronoun => "possessive_pronoun",
            Category::Auxiliary => "auxiliary",
            Category::Particle => "particle",
        }
    }
}

impl fmt::Display for Category {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}
