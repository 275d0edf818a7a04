//! Template instantiation, suite assembly, export and validation sampling.
//!
//! Pair `i` of a suite draws from its own ChaCha8 stream: the generator is
//! seeded with the suite seed and switched to stream `i`
//! ([`pair_rng`]). Pairs therefore never share random state, can be
//! generated in any order or in parallel, and can be regenerated alone.
//! The suite seed itself is derived from the run seed and the suite name
//! ([`suite_seed`]) so that generating one suite or all twenty gives the
//! same bytes for that suite.

pub mod audit;
pub mod export;
mod instantiate;
pub mod template;
pub mod validation;

use std::collections::{BTreeMap, HashSet};

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::lang::Language;
use crate::lexicon::Lexicon;
use crate::morphology::{Morphology, MorphologyError};

pub use audit::{audit_pair, audit_suite, is_ergative_suite, AuditFailure, HINDI_ERGATIVE};
pub use export::{export_suite, import_suite, list_suites, read_manifest, SuiteFormatError, SuiteManifest};
pub use instantiate::{Forced, Generator};
pub use template::{
    load_template, load_templates, Alternation, CrossConstraint, Realize, Slot, TargetRule, Template, TemplateError,
};
pub use validation::{sample_validation_subset, SampleTooLarge, ValidationItem};

pub const DEFAULT_PAIRS: usize = 1000;
/// Resampling attempts per pair before a constraint is declared unsatisfiable.
pub const ATTEMPT_BUDGET: usize = 1000;

/// The validated suites, in report order.
pub const DEFAULT_SUITES: [&str; 20] = [
    "basque-DO-S_DO_V_AUX",
    "basque-DO-S_IO_DO_V_AUX",
    "basque-IO-IO_S_V_AUX",
    "basque-IO-S_IO_DO_V_AUX",
    "basque-S-IO_S_V_AUX",
    "basque-S-S_DO_V_AUX",
    "basque-S-S_IO_DO_V_AUX",
    "basque-S-S_V_AUX",
    "hindi-S_ne_O_V",
    "hindi-S_ne_PossPRN_O_V",
    "hindi-S_ne_PossPRN_PossN_O_V",
    "hindi-S_O_V",
    "hindi-S_PossPRN_O_V",
    "hindi-S_PossPRN_PossN_O_V",
    "swahili-N_of_Poss_D_A_V",
    "swahili-N_of_Poss_D_AP_ni_AN",
    "swahili-N_of_Poss_D_AP_V_ni_AN",
    "swahili-N_of_Poss_D_ni_A",
    "swahili-N_of_Poss_D_V",
    "swahili-N_of_Poss_V",
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct MinimalPair {
    pub id: u32,
    pub condition: String,
    pub grammatical_target: String,
    pub ungrammatical_target: String,
    /// Sampled lemmas and features (`ROLE.lemma`, `ROLE.number`, ...), the
    /// focused argument and the alternation that built the bad target.
    pub metadata: BTreeMap<String, String>,
}

impl MinimalPair {
    pub fn grammatical_sentence(&self) -> String {
        format!("{} {}", self.condition, self.grammatical_target)
    }

    pub fn ungrammatical_sentence(&self) -> String {
        format!("{} {}", self.condition, self.ungrammatical_target)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TestSuite {
    pub name: String,
    pub language: Language,
    pub template_id: String,
    pub seed: u64,
    pub validated: bool,
    pub pairs: Vec<MinimalPair>,
}

#[derive(Debug, thiserror::Error)]
pub enum GenerateError {
    #[error("template `{suite}` is for {template}, lexicon is {lexicon}")]
    LanguageMismatch {
        suite: String,
        template: Language,
        lexicon: Language,
    },
    #[error("{suite}: no lexicon entry satisfies slot `{role}`: {reason}")]
    NoCandidates {
        suite: String,
        role: String,
        reason: String,
    },
    #[error("{suite}: forced choice `{key}` = `{value}` is not admissible")]
    BadForcedChoice { suite: String, key: String, value: String },
    #[error("{suite}: no pair satisfied `{constraint}` within {attempts} attempts")]
    Unsatisfiable {
        suite: String,
        constraint: String,
        attempts: usize,
    },
    #[error("{suite}: only {achieved} of {requested} unique pairs within the attempt budget")]
    TooFewUnique {
        suite: String,
        achieved: usize,
        requested: usize,
    },
    #[error("{suite}: cannot resolve `{expr}` for slot `{role}`")]
    Unresolved { suite: String, role: String, expr: String },
    #[error("{suite}: slot `{role}`: {source}")]
    Morphology {
        suite: String,
        role: String,
        source: MorphologyError,
    },
    #[error("{suite}: malformed pair: {source}")]
    Malformed { suite: String, source: SplitError },
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SplitError {
    #[error("sentences are identical")]
    Identical,
    #[error("sentences have different word counts ({0} vs {1})")]
    LengthMismatch(usize, usize),
    #[error("sentences differ in {0} words, expected exactly one")]
    MultipleDifferences(usize),
    #[error("sentences differ in their first word, so there is no condition")]
    EmptyCondition,
    #[error("sentence contains empty tokens (repeated or edge spaces)")]
    EmptyToken,
}

/// Splits a pair of single-space-separated sentences that differ in exactly
/// one word into `(condition, grammatical_target, ungrammatical_target)`.
/// The condition is the longest common word prefix; the targets are the
/// remainders, so `condition + " " + target` restores each sentence.
pub fn split_condition_target(grammatical: &str, ungrammatical: &str) -> Result<(String, String, String), SplitError> {
    let g: Vec<&str> = grammatical.split(' ').collect();
    let u: Vec<&str> = ungrammatical.split(' ').collect();
    if g.iter().chain(&u).any(|w| w.is_empty()) {
        return Err(SplitError::EmptyToken);
    }
    if g.len() != u.len() {
        return Err(SplitError::LengthMismatch(g.len(), u.len()));
    }
    let diffs: Vec<usize> = (0..g.len()).filter(|&i| g[i] != u[i]).collect();
    match diffs.as_slice() {
        [] => Err(SplitError::Identical),
        [0] => Err(SplitError::EmptyCondition),
        [i] => Ok((g[..*i].join(" "), g[*i..].join(" "), u[*i..].join(" "))),
        more => Err(SplitError::MultipleDifferences(more.len())),
    }
}

fn fnv1a64(bytes: &[u8]) -> u64 {
    let mut h: u64 = 0xcbf2_9ce4_8422_2325;
    for b in bytes {
        h ^= u64::from(*b);
        h = h.wrapping_mul(0x0000_0100_0000_01b3);
    }
    h
}

fn splitmix64(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9e37_79b9_7f4a_7c15);
    z = (z ^ (z >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    z ^ (z >> 31)
}

/// Seed of one suite within a run: `splitmix64(run_seed ^ fnv1a64(name))`.
pub fn suite_seed(run_seed: u64, suite_name: &str) -> u64 {
    splitmix64(run_seed ^ fnv1a64(suite_name.as_bytes()))
}

/// Random stream of pair `index`: ChaCha8 keyed by the suite seed, stream
/// id `index`.
pub fn pair_rng(suite_seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(suite_seed);
    rng.set_stream(index);
    rng
}

/// Draws one pair for `template` from `rng`.
pub fn instantiate_pair(
    template: &Template,
    lexicon: &Lexicon,
    morphology: &Morphology,
    rng: &mut ChaCha8Rng,
) -> Result<MinimalPair, GenerateError> {
    Generator::new(template, lexicon, morphology)?.instantiate(rng, 0, &Forced::default())
}

pub fn generate_suite(
    template: &Template,
    lexicon: &Lexicon,
    morphology: &Morphology,
    seed: u64,
    n: usize,
) -> Result<TestSuite, GenerateError> {
    Generator::new(template, lexicon, morphology)?.generate_suite(seed, n)
}

impl Generator<'_> {
    /// `n` pairs unique on the grammatical sentence. Pair `i`'s first draw
    /// comes from stream `i`; on collision with an earlier pair it keeps
    /// drawing from the same stream, so the outcome does not depend on
    /// scheduling.
    pub fn generate_suite(&self, seed: u64, n: usize) -> Result<TestSuite, GenerateError> {
        let first: Vec<(ChaCha8Rng, MinimalPair)> = (0..n)
            .into_par_iter()
            .map(|i| {
                let mut rng = pair_rng(seed, i as u64);
                let pair = self.instantiate(&mut rng, i as u32, &Forced::default())?;
                Ok((rng, pair))
            })
            .collect::<Result<_, GenerateError>>()?;

        let mut seen = HashSet::with_capacity(n);
        let mut pairs = Vec::with_capacity(n);
        for (i, (mut rng, mut pair)) in first.into_iter().enumerate() {
            let mut redraws = 0;
            while !seen.insert(pair.grammatical_sentence()) {
                redraws += 1;
                if redraws > ATTEMPT_BUDGET {
                    return Err(GenerateError::TooFewUnique {
                        suite: self.template().suite_name.clone(),
                        achieved: pairs.len(),
                        requested: n,
                    });
                }
                pair = self.instantiate(&mut rng, i as u32, &Forced::default())?;
            }
            pairs.push(pair);
        }

        let t = self.template();
        Ok(TestSuite {
            name: t.suite_name.clone(),
            language: t.language,
            template_id: t.suite_name.clone(),
            seed,
            validated: t.validated,
            pairs,
        })
    }
}
