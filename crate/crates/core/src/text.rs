//! Unicode helpers shared by loaders and exporters.

use unicode_normalization::{is_nfc, UnicodeNormalization};

pub fn is_normalized(s: &str) -> bool {
    is_nfc(s)
}

pub fn nfc(s: &str) -> String {
    s.nfc().collect()
}

/// Upper-cases the first character, leaving the rest untouched.
pub fn capitalize_first(s: &str) -> String {
    let mut chars = s.chars();
    match chars.next() {
        Some(first) => first.to_uppercase().chain(chars).collect(),
        None => String::new(),
    }
}

/// Whitespace tokenization used everywhere a "word" is meant.
pub fn words(s: &str) -> Vec<&str> {
    s.split_whitespace().collect()
}
