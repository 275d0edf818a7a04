//! On-disk representation of lexicon documents.

use std::collections::BTreeMap;
use std::fmt;
use std::marker::PhantomData;

use serde::de::{MapAccess, Visitor};
use serde::{Deserialize, Deserializer, Serialize};

use super::Lexicon;
use crate::lang::{Category, Language};

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct LexiconDoc {
    pub schema_version: u32,
    pub language: Language,
    pub version: String,
    pub features: BTreeMap<Category, Vec<String>>,
    #[serde(default)]
    pub inflection: BTreeMap<Category, Vec<String>>,
    pub entries: Vec<EntryDoc>,
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub(super) struct EntryDoc {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub language: Option<Language>,
    pub lemma: String,
    pub category: Category,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gloss: Option<String>,
    #[serde(default)]
    pub features: Pairs<FeatureValue>,
    #[serde(default, skip_serializing_if = "Pairs::is_empty")]
    pub forms: Pairs<String>,
}

/// Feature values are text; integers are accepted for hand-written
/// numeric features such as Swahili noun classes.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
pub(super) enum FeatureValue {
    Text(String),
    Int(i64),
}

impl FeatureValue {
    pub fn into_text(self) -> String {
        match self {
            FeatureValue::Text(s) => s,
            FeatureValue::Int(i) => i.to_string(),
        }
    }
}

/// A JSON object read as an ordered list of pairs, so that repeated keys
/// survive deserialization and can be reported instead of silently merged.
#[derive(Debug, Clone)]
pub(super) struct Pairs<V>(pub Vec<(String, V)>);

impl<V> Default for Pairs<V> {
    fn default() -> Self {
        Pairs(Vec::new())
    }
}

impl<V> Pairs<V> {
    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

impl<V: Serialize> Serialize for Pairs<V> {
    fn serialize<S: serde::Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        use serde::ser::SerializeMap;
        let mut map = serializer.serialize_map(Some(self.0.len()))?;
        for (k, v) in &self.0 {
            map.serialize_entry(k, v)?;
        }
        map.end()
    }
}

impl<'de, V: Deserialize<'de>> Deserialize<'de> for Pairs<V> {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        struct PairsVisitor<V>(PhantomData<V>);

        impl<'de, V: Deserialize<'de>> Visitor<'de> for PairsVisitor<V> {
            type Value = Pairs<V>;

            fn expecting(&self, f: &mut fmt::Formatter) -> fmt::Result {
                f.write_str("a JSON object")
            }

            fn visit_map<A: MapAccess<'de>>(self, mut access: A) -> Result<Self::Value, A::Error> {
                let mut out = Vec::new();
                while let Some((k, v)) = access.next_entry::<String, V>()? {
                    out.push((k, v));
                }
                Ok(Pairs(out))
            }
        }

        deserializer.deserialize_map(PairsVisitor(PhantomData))
    }
}

impl LexiconDoc {
    pub fn from_lexicon(lexicon: &Lexicon) -> Self {
        let names = |m: &BTreeMap<Category, std::collections::BTreeSet<String>>| {
            m.iter().map(|(c, set)| (*c, set.iter().cloned().collect())).collect()
        };
        LexiconDoc {
            schema_version: super::LEXICON_SCHEMA_VERSION,
            language: lexicon.language,
            version: lexicon.version.clone(),
            features: names(&lexicon.schema.lexical),
            inflection: names(&lexicon.schema.inflection),
            entries: lexicon
                .entries()
                .iter()
                .map(|e| EntryDoc {
                    language: None,
                    lemma: e.lemma.clone(),
                    category: e.category,
                    gloss: e.gloss.clone(),
                    features: Pairs(
                        e.features
                            .iter()
                            .map(|(k, v)| (k.clone(), FeatureValue::Text(v.clone())))
                            .collect(),
                    ),
                    forms: Pairs(e.forms.iter().map(|(k, v)| (k.clone(), v.clone())).collect()),
                })
                .collect(),
        }
    }
}
