//! Basque case suffixation and auxiliary paradigm lookup.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{MorphologyError, Number, TableError};
use crate::lang::{Category, Language};
use crate::lexicon::LexicalEntry;

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Case {
    Ergative,
    Absolutive,
    Dative,
}

impl Case {
    pub const ALL: [Case; 3] = [Case::Ergative, Case::Absolutive, Case::Dative];

    pub fn as_str(self) -> &'static str {
        match self {
            Case::Ergative => "ergative",
            Case::Absolutive => "absolutive",
            Case::Dative => "dative",
        }
    }

    pub fn parse(s: &str) -> Option<Case> {
        Case::ALL.into_iter().find(|c| c.as_str() == s)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct CaseSpec {
    pub case: Case,
    pub number: Number,
}

impl CaseSpec {
    pub fn new(case: Case, number: Number) -> Self {
        Self { case, number }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StemFinal {
    Vowel,
    Consonant,
}

impl StemFinal {
    pub fn parse(s: &str) -> Option<StemFinal> {
        match s {
            "vowel" => Some(StemFinal::Vowel),
            "consonant" => Some(StemFinal::Consonant),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseRuleDoc {
    case: Case,
    number: Number,
    stem_final: StemFinal,
    suffix: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct CaseTableDoc {
    schema_version: u32,
    table: String,
    #[serde(default)]
    source: String,
    rules: Vec<CaseRuleDoc>,
}

/// Suffix table keyed by (case, number, stem-final class). Epenthetic
/// material, if any, is part of the suffix string.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasqueCaseTable {
    suffixes: BTreeMap<(Case, Number, StemFinal), String>,
}

impl BasqueCaseTable {
    pub fn from_json_str(text: &str) -> Result<Self, TableError> {
        let doc: CaseTableDoc = serde_json::from_str(text)?;
        super::check_header(doc.schema_version, &doc.table, "basque_case")?;
        let mut problems = Vec::new();
        let mut suffixes = BTreeMap::new();
        for r in doc.rules {
            let key = (r.case, r.number, r.stem_final);
            if suffixes.insert(key, r.suffix).is_some() {
                problems.push(format!("duplicate rule for {key:?}"));
            }
        }
        for case in Case::ALL {
            for number in Number::ALL {
                for sf in [StemFinal::Vowel, StemFinal::Consonant] {
                    if !suffixes.contains_key(&(case, number, sf)) {
                        problems.push(format!("missing rule for ({case:?}, {number:?}, {sf:?})"));
                    }
                }
            }
        }
        if problems.is_empty() {
            Ok(Self { suffixes })
        } else {
            Err(TableError::Invalid(problems))
        }
    }

    pub fn suffix(&self, spec: CaseSpec, stem_final: StemFinal) -> Option<&str> {
        self.suffixes
            .get(&(spec.case, spec.number, stem_final))
            .map(String::as_str)
    }

    /// Stem + case suffix for a Basque noun.
    pub fn case_mark(&self, entry: &LexicalEntry, spec: CaseSpec) -> Result<String, MorphologyError> {
        if entry.language != Language::Basque || entry.category != Category::Noun {
            return Err(MorphologyError::WrongEntry {
                expected: "a Basque noun",
                entry: entry.to_string(),
            });
        }
        let stem_final =
            entry
                .feature("stem_final")
                .and_then(StemFinal::parse)
                .ok_or_else(|| MorphologyError::MissingFeature {
                    entry: entry.to_string(),
                    feature: "stem_final".into(),
                })?;
        let suffix = self
            .suffix(spec, stem_final)
            .expect("case table is complete by construction");
        Ok(format!("{}{}", entry.lemma, suffix))
    }
}

#[allow(non_camel_case_types)]
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum Paradigm {
    /// Intransitive: subject only.
    S,
    /// Transitive: subject and direct object.
    S_DO,
    /// Ditransitive: subject, indirect and direct object.
    S_IO_DO,
    /// Intransitive with a dative argument.
    IO_S,
}

impl Paradigm {
    pub const ALL: [Paradigm; 4] = [Paradigm::S, Paradigm::S_DO, Paradigm::S_IO_DO, Paradigm::IO_S];

    pub fn has_direct_object(self) -> bool {
        matches!(self, Paradigm::S_DO | Paradigm::S_IO_DO)
    }

    pub fn has_indirect_object(self) -> bool {
        matches!(self, Paradigm::S_IO_DO | Paradigm::IO_S)
    }

    pub fn argument_count(self) -> u32 {
        1 + self.has_direct_object() as u32 + self.has_indirect_object() as u32
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tense {
    Past,
    Present,
}

impl Tense {
    pub const ALL: [Tense; 2] = [Tense::Past, Tense::Present];

    pub fn parse(s: &str) -> Option<Tense> {
        match s {
            "past" => Some(Tense::Past),
            "present" => Some(Tense::Present),
            _ => None,
        }
    }
}

/// Third-person auxiliary agreement key.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct BasqueAuxKey {
    pub paradigm: Paradigm,
    pub tense: Tense,
    pub subject: Number,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub direct_object: Option<Number>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub indirect_object: Option<Number>,
}

impl BasqueAuxKey {
    pub fn is_well_formed(&self) -> bool {
        self.direct_object.is_some() == self.paradigm.has_direct_object()
            && self.indirect_object.is_some() == self.paradigm.has_indirect_object()
    }

    /// All well-formed keys of a paradigm: 2^arguments × tenses.
    pub fn all_for(paradigm: Paradigm) -> Vec<BasqueAuxKey> {
        let opt = |present: bool| -> Vec<Option<Number>> {
            if present {
                Number::ALL.iter().copied().map(Some).collect()
            } else {
                vec![None]
            }
        };
        let mut keys = Vec::new();
        for tense in Tense::ALL {
            for subject in Number::ALL {
                for direct_object in opt(paradigm.has_direct_object()) {
                    for indirect_object in opt(paradigm.has_indirect_object()) {
                        keys.push(BasqueAuxKey {
                            paradigm,
                            tense,
                            subject,
                            direct_object,
                            indirect_object,
                        });
                    }
                }
            }
        }
        keys
    }
}

impl fmt::Display for BasqueAuxKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:?} {:?} S={}", self.paradigm, self.tense, self.subject)?;
        if let Some(n) = self.direct_object {
            write!(f, " DO={n}")?;
        }
        if let Some(n) = self.indirect_object {
            write!(f, " IO={n}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
struct AuxFormDoc {
    #[serde(flatten)]
    key: BasqueAuxKey,
    form: String,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct AuxTableDoc {
    schema_version: u32,
    table: String,
    #[serde(default)]
    source: String,
    forms: Vec<AuxFormDoc>,
}

/// Listed auxiliary forms; lookups never synthesize a form.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BasqueAuxTable {
    forms: BTreeMap<BasqueAuxKey, String>,
}

impl BasqueAuxTable {
    /// Loads a table, rejecting malformed and duplicate keys. Missing keys
    /// are allowed here and surface as lookup errors.
    pub fn from_json_str(text: &str) -> Result<Self, TableError> {
        let doc: AuxTableDoc = serde_json::from_str(text)?;
        super::check_header(doc.schema_version, &doc.table, "basque_auxiliary")?;
        let mut problems = Vec::new();
        let mut forms = BTreeMap::new();
        for f in doc.forms {
            if !f.key.is_well_formed() {
                problems.push(format!("ill-formed key {}", f.key));
            } else if f.form.trim().is_empty() {
                problems.push(format!("empty form for {}", f.key));
            } else if forms.insert(f.key, f.form).is_some() {
                problems.push(format!("duplicate key {}", f.key));
            }
        }
        if problems.is_empty() {
            Ok(Self { forms })
        } else {
            Err(TableError::Invalid(problems))
        }
    }

    pub fn lookup(&self, key: &BasqueAuxKey) -> Result<&str, MorphologyError> {
        self.forms
            .get(key)
            .map(String::as_str)
            .ok_or_else(|| MorphologyError::MissingAuxForm(key.to_string()))
    }

    /// Keys a complete table would contain but this one lacks.
    pub fn missing_keys(&self) -> Vec<BasqueAuxKey> {
        Paradigm::ALL
            .into_iter()
            .flat_map(BasqueAuxKey::all_for)
            .filter(|k| !self.forms.contains_key(k))
            .collect()
    }

    pub fn len(&self) -> usize {
        self.forms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.forms.is_empty()
    }
}
