//! Checks a finished pair against the constraints its suite promises.
//!
//! Audits read only the pair text and its metadata, so they apply equally
//! to freshly generated suites and to suites imported from disk.

use std::fmt;

use super::{split_condition_target, MinimalPair, TestSuite};
use crate::lang::Language;
use crate::text;

/// Postposition marking the ergative subject in Hindi.
pub const HINDI_ERGATIVE: &str = "ने";

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct AuditFailure {
    pub suite: String,
    pub pair_id: u32,
    pub check: &'static str,
    pub detail: String,
}

impl fmt::Display for AuditFailure {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} #{}: {}: {}", self.suite, self.pair_id, self.check, self.detail)
    }
}

/// Whether a Hindi suite puts its subject in the ergative.
pub fn is_ergative_suite(suite: &str) -> bool {
    suite.split(['-', '_']).any(|part| part == "ne")
}

pub fn audit_pair(suite: &str, language: Language, pair: &MinimalPair) -> Vec<AuditFailure> {
    let mut out = Vec::new();
    let mut fail = |check: &'static str, detail: String| {
        out.push(AuditFailure {
            suite: suite.to_string(),
            pair_id: pair.id,
            check,
            detail,
        })
    };

    for (field, s) in [
        ("condition", &pair.condition),
        ("grammatical_target", &pair.grammatical_target),
        ("ungrammatical_target", &pair.ungrammatical_target),
    ] {
        if !text::is_normalized(s) {
            fail("nfc", format!("{field} is not NFC"));
        }
    }
    let good = pair.grammatical_sentence();
    let bad = pair.ungrammatical_sentence();
    match split_condition_target(&good, &bad) {
        Ok((c, g, u)) if c == pair.condition && g == pair.grammatical_target && u == pair.ungrammatical_target => {}
        Ok(_) => fail("split", "condition is not the longest common prefix".into()),
        Err(e) => fail("split", e.to_string()),
    }
    let stop = language.full_stop();
    if !good.ends_with(stop) || !bad.ends_with(stop) {
        fail("punctuation", format!("sentences must end with `{stop}`"));
    }

    let md = |key: &str| pair.metadata.get(key).map(String::as_str);
    match language {
        Language::Basque => match (md("focus"), md("arguments")) {
            (Some(focus), Some(args)) => {
                let number = |role: &str| md(&format!("{role}.number"));
                let focus_number = number(focus);
                if focus_number.is_none() {
                    fail("number contrast", format!("no number recorded for {focus}"));
                }
                for other in args.split(',').filter(|a| *a != focus) {
                    if number(other) == focus_number {
                        fail(
                            "number contrast",
                            format!("{focus} and {other} are both {}", focus_number.unwrap_or("?")),
                        );
                    }
                }
            }
            _ => fail("metadata", "missing focus or arguments".into()),
        },
        Language::Swahili => match (md("focus"), md("attractor")) {
            (Some(focus), Some(attractor)) => {
                let class = |role: &str| md(&format!("{role}.noun_class"));
                if class(focus).is_none() || class(focus) == class(attractor) {
                    fail(
                        "class contrast",
                        format!("{focus} and {attractor} share class {}", class(focus).unwrap_or("?")),
                    );
                }
            }
            _ => fail("metadata", "missing focus or attractor".into()),
        },
        Language::Hindi => {
            let ergative = is_ergative_suite(suite);
            let has_ne = pair.condition.split(' ').any(|w| w == HINDI_ERGATIVE);
            if ergative != has_ne {
                fail(
                    "ergative marking",
                    format!(
                        "condition {} `{HINDI_ERGATIVE}`",
                        if has_ne { "contains" } else { "lacks" }
                    ),
                );
            }
            let expected = if ergative { "pfv" } else { "hab" };
            if md("grammatical.aspect") != Some(expected) {
                fail("aspect", format!("grammatical aspect should be {expected}"));
            }
        }
    }
    out
}

/// All failures in a suite, plus one for every duplicated sentence pair.
pub fn audit_suite(suite: &TestSuite) -> Vec<AuditFailure> {
    let mut out: Vec<AuditFailure> = suite
        .pairs
        .iter()
        .flat_map(|p| audit_pair(&suite.name, suite.language, p))
        .collect();
    let mut seen = std::collections::HashSet::new();
    for p in &suite.pairs {
        if !seen.insert(p.grammatical_sentence()) {
            out.push(AuditFailure {
                suite: suite.name.clone(),
                pair_id: p.id,
                check: "unique",
                detail: "grammatical sentence repeats an earlier pair".into(),
            });
        }
    }
    out
}
