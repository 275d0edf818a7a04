//! Blinded samples for native-speaker validation.

use rand::seq::{index, SliceRandom};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::TestSuite;

/// One item shown to an annotator: two full sentences in random order.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ValidationItem {
    pub suite: String,
    pub pair_id: u32,
    pub sentence_a: String,
    pub sentence_b: String,
    /// `"A"` or `"B"`: which sentence is the grammatical one.
    pub grammatical: String,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
#[error("suite `{suite}` has {available} pairs, cannot sample {requested}")]
pub struct SampleTooLarge {
    pub suite: String,
    pub available: usize,
    pub requested: usize,
}

/// `k` distinct pairs from every suite, shuffled together, each with the
/// grammatical sentence placed at A or B by a fair coin.
pub fn sample_validation_subset(
    suites: &[TestSuite],
    k: usize,
    seed: u64,
) -> Result<Vec<ValidationItem>, SampleTooLarge> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut items = Vec::with_capacity(suites.len() * k);
    for suite in suites {
        if k > suite.pairs.len() {
            return Err(SampleTooLarge {
                suite: suite.name.clone(),
                available: suite.pairs.len(),
                requested: k,
            });
        }
        for i in index::sample(&mut rng, suite.pairs.len(), k) {
            let pair = &suite.pairs[i];
            let (good, bad) = (pair.grammatical_sentence(), pair.ungrammatical_sentence());
            let a_first = rng.gen_bool(0.5);
            let (sentence_a, sentence_b) = if a_first { (good, bad) } else { (bad, good) };
            items.push(ValidationItem {
                suite: suite.name.clone(),
                pair_id: pair.id,
                sentence_a,
                sentence_b,
                grammatical: if a_first { "A" } else { "B" }.to_string(),
            });
        }
    }
    items.shuffle(&mut rng);
    Ok(items)
}
