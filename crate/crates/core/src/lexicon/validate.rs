use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;

use super::doc::LexiconDoc;
use super::{FeatureSchema, LexicalEntry, Lexicon, LexiconError, LoadOptions};
use crate::bundle::FeatureBundle;
use crate::lang::{Category, Language};
use crate::text;

/// One violated rule, attributed to an entry by its index in the document.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ValidationIssue {
    pub index: usize,
    pub lemma: String,
    pub rule: Rule,
}

impl fmt::Display for ValidationIssue {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "entry #{} `{}`: {}", self.index, self.lemma, self.rule)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Rule {
    EmptyLemma,
    NotNfc { field: String },
    LanguageMismatch(Language),
    DuplicateEntry { first: usize },
    DuplicateFeature(String),
    UnknownFeature(String),
    InvalidFeatureValue { feature: String, value: String },
    MissingFeature(String),
    DuplicateFormKey(String),
    NonCanonicalFormKey { key: String, reason: String },
    UnknownInflectionFeature { key: String, feature: String },
    EmptyForm(String),
    MissingForm(String),
    StemFinalMismatch { declared: String },
}

impl fmt::Display for Rule {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Rule::EmptyLemma => write!(f, "lemma is empty"),
            Rule::NotNfc { field } => write!(f, "{field} is not NFC-normalized"),
            Rule::LanguageMismatch(l) => write!(f, "entry language `{l}` differs from the document"),
            Rule::DuplicateEntry { first } => {
                write!(
                    f,
                    "duplicate (language, lemma, category); first defined at entry #{first}"
                )
            }
            Rule::DuplicateFeature(name) => write!(f, "feature `{name}` given twice"),
            Rule::UnknownFeature(name) => write!(f, "feature `{name}` is not declared for this category"),
            Rule::InvalidFeatureValue { feature, value } => {
                write!(f, "invalid value `{value}` for feature `{feature}`")
            }
            Rule::MissingFeature(name) => write!(f, "required feature `{name}` is missing"),
            Rule::DuplicateFormKey(key) => write!(f, "forms key `{key}` given twice"),
            Rule::NonCanonicalFormKey { key, reason } => {
                write!(f, "forms key `{key}` is not canonical: {reason}")
            }
            Rule::UnknownInflectionFeature { key, feature } => {
                write!(f, "forms key `{key}` uses undeclared inflection feature `{feature}`")
            }
            Rule::EmptyForm(key) => write!(f, "form for `{key}` is empty"),
            Rule::MissingForm(key) => write!(f, "required form `{key}` is missing"),
            Rule::StemFinalMismatch { declared } => {
                write!(f, "stem_final `{declared}` does not match the lemma's last letter")
            }
        }
    }
}

pub(super) fn build(doc: LexiconDoc, opts: LoadOptions) -> Result<Lexicon, LexiconError> {
    let mut issues = Vec::new();
    let language = doc.language;

    let schema = FeatureSchema {
        lexical: to_sets(doc.features),
        inflection: to_sets(doc.inflection),
    };

    let mut fix = |index: usize, lemma: &str, field: String, value: String| -> String {
        if text::is_normalized(&value) {
            value
        } else if opts.normalize {
            text::nfc(&value)
        } else {
            issues.push(ValidationIssue {
                index,
                lemma: lemma.to_string(),
                rule: Rule::NotNfc { field },
            });
            value
        }
    };

    let mut entries = Vec::with_capacity(doc.entries.len());
    let mut structural = Vec::new();
    for (index, raw) in doc.entries.into_iter().enumerate() {
        let lemma = fix(index, &raw.lemma, "lemma".into(), raw.lemma.clone());
        if let Some(l) = raw.language {
            if l != language {
                structural.push(issue(index, &lemma, Rule::LanguageMismatch(l)));
            }
        }

        let mut features = BTreeMap::new();
        for (name, value) in raw.features.0 {
            let value = fix(index, &lemma, format!("feature `{name}`"), value.into_text());
            if features.insert(name.clone(), value).is_some() {
                structural.push(issue(index, &lemma, Rule::DuplicateFeature(name)));
            }
        }

        let mut forms = BTreeMap::new();
        for (key, form) in raw.forms.0 {
            let form = fix(index, &lemma, format!("form `{key}`"), form);
            let key_nfc = fix(index, &lemma, format!("forms key `{key}`"), key);
            if forms.contains_key(&key_nfc) {
                structural.push(issue(index, &lemma, Rule::DuplicateFormKey(key_nfc.clone())));
                continue;
            }
            match FeatureBundle::parse_canonical(&key_nfc) {
                Ok(bundle) if bundle.key() == key_nfc => {}
                Ok(bundle) => structural.push(issue(
                    index,
                    &lemma,
                    Rule::NonCanonicalFormKey {
                        key: key_nfc.clone(),
                        reason: format!("expected `{}`", bundle.key()),
                    },
                )),
                Err(e) => structural.push(issue(
                    index,
                    &lemma,
                    Rule::NonCanonicalFormKey {
                        key: key_nfc.clone(),
                        reason: e.to_string(),
                    },
                )),
            }
            forms.insert(key_nfc, form);
        }

        let gloss = raw.gloss;
        entries.push(LexicalEntry {
            language,
            lemma,
            category: raw.category,
            gloss,
            features,
            forms,
        });
    }
    issues.extend(structural);

    let lexicon = Lexicon {
        language,
        version: doc.version,
        schema,
        entries,
    };
    issues.extend(check(&lexicon));
    if issues.is_empty() {
        Ok(lexicon)
    } else {
        issues.sort_by_key(|i| i.index);
        Err(LexiconError::Validation(issues))
    }
}

fn to_sets(m: BTreeMap<Category, Vec<String>>) -> BTreeMap<Category, BTreeSet<String>> {
    m.into_iter()
        .map(|(c, names)| (c, names.into_iter().collect()))
        .collect()
}

fn issue(index: usize, lemma: &str, rule: Rule) -> ValidationIssue {
    ValidationIssue {
        index,
        lemma: lemma.to_string(),
        rule,
    }
}

/// Semantic checks over a materialized lexicon.
pub(super) fn check(lexicon: &Lexicon) -> Vec<ValidationIssue> {
    let mut issues = Vec::new();
    let mut seen: HashMap<(&str, Category), usize> = HashMap::new();

    for (index, e) in lexicon.entries().iter().enumerate() {
        let mut push = |rule| issues.push(issue(index, &e.lemma, rule));

        if e.lemma.trim().is_empty() {
            push(Rule::EmptyLemma);
        }
        if e.language != lexicon.language {
            push(Rule::LanguageMismatch(e.language));
        }
        if !text::is_normalized(&e.lemma) {
            push(Rule::NotNfc { field: "lemma".into() });
        }
        if let Some(&first) = seen.get(&(e.lemma.as_str(), e.category)) {
            push(Rule::DuplicateEntry { first });
        } else {
            seen.insert((e.lemma.as_str(), e.category), index);
        }

        for (name, value) in &e.features {
            if !lexicon.schema.allows_lexical(e.category, name) {
                push(Rule::UnknownFeature(name.clone()));
            }
            if value.is_empty() || !closed_value_ok(name, value) {
                push(Rule::InvalidFeatureValue {
                    feature: name.clone(),
                    value: value.clone(),
                });
            }
        }

        for (key, form) in &e.forms {
            if form.trim().is_empty() {
                push(Rule::EmptyForm(key.clone()));
            }
            if let Ok(bundle) = FeatureBundle::parse(key) {
                for (name, _) in bundle.iter() {
                    if !lexicon.schema.allows_inflection(e.category, name) {
                        push(Rule::UnknownInflectionFeature {
                            key: key.clone(),
                            feature: name.to_string(),
                        });
                    }
                }
            }
        }

        for rule in category_rules(e) {
            push(rule);
        }
    }
    issues
}

/// Value domains for the closed features shared across languages.
fn closed_value_ok(name: &str, value: &str) -> bool {
    match name {
        "number" => matches!(value, "sg" | "pl"),
        "animacy" => matches!(value, "animate" | "inanimate"),
        "gender" => matches!(value, "m" | "f"),
        "stem_final" => matches!(value, "vowel" | "consonant"),
        "noun_class" | "agreement_class" => value.parse::<u8>().is_ok_and(|c| (1..=18).contains(&c)),
        _ => true,
    }
}

fn required_forms(keys: impl IntoIterator<Item = String>, e: &LexicalEntry) -> Vec<Rule> {
    keys.into_iter()
        .filter(|k| !e.forms.contains_key(k))
        .map(Rule::MissingForm)
        .collect()
}

fn category_rules(e: &LexicalEntry) -> Vec<Rule> {
    let mut out = Vec::new();
    match (e.language, e.category) {
        (Language::Swahili, Category::Noun) => {
            if e.feature("noun_class").is_none() {
                out.push(Rule::MissingFeature("noun_class".into()));
            }
        }
        (Language::Basque, Category::Noun) => match e.feature("stem_final") {
            None => out.push(Rule::MissingFeature("stem_final".into())),
            Some(declared) => {
                let last = e.lemma.chars().last().unwrap_or(' ');
                let is_vowel = "aeiou".contains(last.to_ascii_lowercase());
                let expected = if is_vowel { "vowel" } else { "consonant" };
                if declared != expected && closed_value_ok("stem_final", declared) {
                    out.push(Rule::StemFinalMismatch {
                        declared: declared.to_string(),
                    });
                }
            }
        },
        (Language::Hindi, Category::Verb) => {
            out.extend(required_forms(hindi_verb_bundle_keys(), e));
        }
        (Language::Hindi, Category::Noun) => {
            if e.feature("gender").is_none() {
                out.push(Rule::MissingFeature("gender".into()));
            }
            out.extend(required_forms(hindi_noun_bundle_keys(), e));
        }
        (Language::Hindi, Category::PossessivePronoun) => {
            out.extend(required_forms(hindi_agreeing_bundle_keys(), e));
        }
        (Language::Hindi, Category::Particle) if !e.forms.is_empty() => {
            out.extend(required_forms(hindi_agreeing_bundle_keys(), e));
        }
        _ => {}
    }
    out
}

/// Every aspect × gender × number bundle a Hindi template can request.
pub fn hindi_verb_bundle_keys() -> Vec<String> {
    let mut keys = Vec::new();
    for aspect in ["hab", "pfv"] {
        for gender in ["m", "f"] {
            for number in ["sg", "pl"] {
                keys.push(
                    FeatureBundle::new()
                        .with("aspect", aspect)
                        .with("gender", gender)
                        .with("number", number)
                        .with("tense", "prs")
                        .key(),
                );
            }
        }
    }
    keys
}

pub fn hindi_noun_bundle_keys() -> Vec<String> {
    let mut keys = Vec::new();
    for case in ["dir", "obl"] {
        for number in ["sg", "pl"] {
            keys.push(FeatureBundle::new().with("case", case).with("number", number).key());
        }
    }
    keys
}

/// Forms of words agreeing with a noun in case, gender and number
/// (possessive pronouns, the genitive postposition).
pub fn hindi_agreeing_bundle_keys() -> Vec<String> {
    let mut keys = Vec::new();
    for case in ["dir", "obl"] {
        for gender in ["m", "f"] {
            for number in ["sg", "pl"] {
                keys.push(
                    FeatureBundle::new()
                        .with("case", case)
                        .with("gender", gender)
                        .with("number", number)
                        .key(),
                );
            }
        }
    }
    keys
}
