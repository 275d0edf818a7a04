//! Feature bundles and their canonical `k=v;k=v` text keys.

use std::collections::BTreeMap;
use std::fmt;

/// A set of feature assignments. Keys are kept sorted, so the canonical
/// key of a bundle is independent of insertion order.
#[derive(Debug, Clone, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct FeatureBundle(BTreeMap<String, String>);

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum BundleKeyError {
    #[error("malformed feature assignment `{0}` (expected k=v)")]
    Malformed(String),
    #[error("feature `{0}` assigned twice")]
    Duplicate(String),
    #[error("keys are not sorted: `{0}` appears after `{1}`")]
    Unsorted(String, String),
}

impl FeatureBundle {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: impl Into<String>, value: impl Into<String>) -> Self {
        self.insert(key, value);
        self
    }

    pub fn insert(&mut self, key: impl Into<String>, value: impl Into<String>) {
        self.0.insert(key.into(), value.into());
    }

    pub fn get(&self, key: &str) -> Option<&str> {
        self.0.get(key).map(String::as_str)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, &str)> {
        self.0.iter().map(|(k, v)| (k.as_str(), v.as_str()))
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    /// Canonical text key: assignments sorted by feature name, `;`-joined.
    pub fn key(&self) -> String {
        self.0
            .iter()
            .map(|(k, v)| format!("{k}={v}"))
            .collect::<Vec<_>>()
            .join(";")
    }

    /// Parses a key, accepting any order but rejecting repeated features.
    pub fn parse(key: &str) -> Result<Self, BundleKeyError> {
        let mut map = BTreeMap::new();
        if key.is_empty() {
            return Ok(Self(map));
        }
        for part in key.split(';') {
            let (k, v) = part
                .split_once('=')
                .filter(|(k, v)| !k.is_empty() && !v.is_empty())
                .ok_or_else(|| BundleKeyError::Malformed(part.to_string()))?;
            if map.insert(k.to_string(), v.to_string()).is_some() {
                return Err(BundleKeyError::Duplicate(k.to_string()));
            }
        }
        Ok(Self(map))
    }

    /// Parses a key and additionally requires it to be in canonical order.
    pub fn parse_canonical(key: &str) -> Result<Self, BundleKeyError> {
        let mut prev: Option<&str> = None;
        for part in key.split(';').filter(|p| !p.is_empty()) {
            let name = part.split('=').next().unwrap_or(part);
            if let Some(p) = prev {
                if name < p {
                    return Err(BundleKeyError::Unsorted(name.to_string(), p.to_string()));
                }
            }
            prev = Some(name);
        }
        Self::parse(key)
    }
}

impl fmt::Display for FeatureBundle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.key())
    }
}

impl<K: Into<String>, V: Into<String>> FromIterator<(K, V)> for FeatureBundle {
    fn from_iter<I: IntoIterator<Item = (K, V)>>(iter: I) -> Self {
        Self(iter.into_iter().map(|(k, v)| (k.into(), v.into())).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn key_is_sorted() {
        let b = FeatureBundle::new()
            .with("tense", "prs")
            .with("aspect", "hab")
            .with("number", "sg")
            .with("gender", "m");
        assert_eq!(b.key(), "aspect=hab;gender=m;number=sg;tense=prs");
    }

    #[test]
    fn duplicate_rejected() {
        assert_eq!(
            FeatureBundle::parse("number=sg;number=pl"),
            Err(BundleKeyError::Duplicate("number".into()))
        );
    }

    #[test]
    fn unsorted_rejected_in_canonical_mode() {
        assert!(FeatureBundle::parse_canonical("number=sg;case=dir").is_err());
        assert!(FeatureBundle::parse("number=sg;case=dir").is_ok());
    }

    #[test]
    fn empty_key() {
        assert!(FeatureBundle::parse("").unwrap().is_empty());
        assert!(FeatureBundle::parse("a=").is_err());
    }

    proptest! {
        #[test]
        fn key_round_trips(pairs in proptest::collection::btree_map("[a-z_]{1,8}", "[a-z0-9]{1,5}", 0..6)) {
            let b: FeatureBundle = pairs.into_iter().collect();
            let parsed = FeatureBundle::parse_canonical(&b.key()).unwrap();
            prop_assert_eq!(parsed, b);
        }
    }
}
