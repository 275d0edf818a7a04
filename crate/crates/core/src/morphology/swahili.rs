//! Swahili noun-class concord.

use std::collections::BTreeMap;
use std::fmt;

use serde::{Deserialize, Serialize};

use super::{MorphologyError, TableError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ConcordSlotKind {
    NounPrefix,
    SubjectVerbPrefix,
    AdjectivePrefix,
    OfPreposition,
    Demonstrative,
    RelativeVerbMarker,
}

impl ConcordSlotKind {
    pub fn as_str(self) -> &'static str {
        match self {
            ConcordSlotKind::NounPrefix => "noun_prefix",
            ConcordSlotKind::SubjectVerbPrefix => "subject_verb_prefix",
            ConcordSlotKind::AdjectivePrefix => "adjective_prefix",
            ConcordSlotKind::OfPreposition => "of_preposition",
            ConcordSlotKind::Demonstrative => "demonstrative",
            ConcordSlotKind::RelativeVerbMarker => "relative_verb_marker",
        }
    }
}

impl fmt::Display for ConcordSlotKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct SwahiliConcordSlot {
    pub slot: ConcordSlotKind,
    pub noun_class: u8,
}

impl SwahiliConcordSlot {
    pub fn new(slot: ConcordSlotKind, noun_class: u8) -> Self {
        Self { slot, noun_class }
    }
}

impl fmt::Display for SwahiliConcordSlot {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} for class {}", self.slot, self.noun_class)
    }
}

/// Which stems a prefix rule applies to.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StemCondition {
    Vowel,
    Consonant,
    /// Stem starts with one of the listed letters.
    Initial(String),
    Any,
}

impl StemCondition {
    fn parse(s: &str) -> Option<Self> {
        match s {
            "vowel" => Some(StemCondition::Vowel),
            "consonant" => Some(StemCondition::Consonant),
            "any" => Some(StemCondition::Any),
            _ => s
                .strip_prefix("initial:")
                .filter(|letters| !letters.is_empty())
                .map(|letters| StemCondition::Initial(letters.to_string())),
        }
    }

    fn matches(&self, stem: &str) -> bool {
        let first = stem.chars().next();
        match self {
            StemCondition::Any => true,
            StemCondition::Vowel => first.is_some_and(is_vowel),
            StemCondition::Consonant => first.is_some_and(|c| !is_vowel(c)),
            StemCondition::Initial(letters) => first.is_some_and(|c| letters.contains(c)),
        }
    }
}

fn is_vowel(c: char) -> bool {
    "aeiou".contains(c)
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct PrefixRule {
    pub when: StemCondition,
    pub prefix: String,
    /// Leading stem characters replaced by the prefix.
    pub drop: usize,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcordEntry {
    pub rules: Vec<PrefixRule>,
    /// Stem → complete surface form, checked before the rules.
    pub exceptions: BTreeMap<String, String>,
}

impl ConcordEntry {
    /// The rule that applies to `stem`, if no exception does.
    pub fn rule_for(&self, stem: &str) -> Option<&PrefixRule> {
        self.rules.iter().find(|r| r.when.matches(stem))
    }
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RuleDoc {
    when: String,
    prefix: String,
    #[serde(default)]
    drop: usize,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct EntryDoc {
    class: u8,
    slot: ConcordSlotKind,
    #[serde(default)]
    prefix: Option<String>,
    #[serde(default)]
    rules: Vec<RuleDoc>,
    #[serde(default)]
    exceptions: BTreeMap<String, String>,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct TableDoc {
    schema_version: u32,
    table: String,
    #[serde(default)]
    #[allow(dead_code)]
    source: String,
    entries: Vec<EntryDoc>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ConcordTable {
    entries: BTreeMap<SwahiliConcordSlot, ConcordEntry>,
}

impl ConcordTable {
    pub fn from_json_str(text: &str) -> Result<Self, TableError> {
        let doc: TableDoc = serde_json::from_str(text)?;
        super::check_header(doc.schema_version, &doc.table, "swahili_concord")?;
        let mut problems = Vec::new();
        let mut entries = BTreeMap::new();
        for e in doc.entries {
            let key = SwahiliConcordSlot::new(e.slot, e.class);
            if !(1..=18).contains(&e.class) {
                problems.push(format!("class {} outside 1..18", e.class));
                continue;
            }
            let mut rules = Vec::new();
            if let Some(prefix) = e.prefix {
                if !e.rules.is_empty() {
                    problems.push(format!("{key}: give either `prefix` or `rules`, not both"));
                }
                rules.push(PrefixRule {
                    when: StemCondition::Any,
                    prefix,
                    drop: 0,
                });
            }
            for r in e.rules {
                match StemCondition::parse(&r.when) {
                    Some(when) => rules.push(PrefixRule {
                        when,
                        prefix: r.prefix,
                        drop: r.drop,
                    }),
                    None => problems.push(format!("{key}: unknown condition `{}`", r.when)),
                }
            }
            if rules.is_empty() {
                problems.push(format!("{key}: no prefix rules"));
            }
            let entry = ConcordEntry {
                rules,
                exceptions: e.exceptions,
            };
            if entries.insert(key, entry).is_some() {
                problems.push(format!("duplicate entry for {key}"));
            }
        }
        if problems.is_empty() {
            Ok(Self { entries })
        } else {
            Err(TableError::Invalid(problems))
        }
    }

    pub fn entry(&self, slot: SwahiliConcordSlot) -> Option<&ConcordEntry> {
        self.entries.get(&slot)
    }

    pub fn slots(&self) -> impl Iterator<Item = SwahiliConcordSlot> + '_ {
        self.entries.keys().copied()
    }

    /// Concord-marked form of `stem` (a leading `-` is ignored).
    pub fn concord(&self, slot: SwahiliConcordSlot, stem: &str) -> Result<String, MorphologyError> {
        let stem = stem.strip_prefix('-').unwrap_or(stem);
        let entry = self.entries.get(&slot).ok_or(MorphologyError::MissingConcord(slot))?;
        if let Some(form) = entry.exceptions.get(stem) {
            return Ok(form.clone());
        }
        let rule = entry.rule_for(stem).ok_or_else(|| MorphologyError::NoConcordRule {
            slot,
            stem: stem.to_string(),
        })?;
        let rest: String = stem.chars().skip(rule.drop).collect();
        Ok(format!("{}{}", rule.prefix, rest))
    }

    /// Past-tense verb agreeing with `noun_class`:
    /// subject prefix + tense marker + (relative marker) + stem.
    pub fn past_verb(
        &self,
        noun_class: u8,
        tense_marker: &str,
        stem: &str,
        relative: bool,
    ) -> Result<String, MorphologyError> {
        let stem = stem.strip_prefix('-').unwrap_or(stem);
        let marker = if relative {
            self.concord(
                SwahiliConcordSlot::new(ConcordSlotKind::RelativeVerbMarker, noun_class),
                "",
            )?
        } else {
            String::new()
        };
        self.concord(
            SwahiliConcordSlot::new(ConcordSlotKind::SubjectVerbPrefix, noun_class),
            &format!("{tense_marker}{marker}{stem}"),
        )
    }
}
