//! Add-k smoothed n-gram baseline over NFC whitespace tokens.
//!
//! `P(w | h) = (c(h, w) + k) / (c(h) + k·V)` where `V` counts the training
//! types plus one unknown-token symbol. Histories shorter than `order - 1`
//! are padded with a start symbol that is never predicted, so it does not
//! enter `V`.

use std::collections::{HashMap, HashSet};

use super::{ScoreError, Scorer, ScorerInfo, DEFAULT_BATCH};
use crate::text;

const BOS: &str = "<s>";
pub const UNK: &str = "<unk>";

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum NgramError {
    #[error("n-gram order must be at least 1, got {0}")]
    Order(usize),
    #[error("smoothing constant must be positive and finite, got {0}")]
    Smoothing(f64),
    #[error("training corpus has no tokens")]
    EmptyCorpus,
}

#[derive(Debug, Default, Clone)]
struct History {
    total: u64,
    next: HashMap<String, u64>,
}

#[derive(Debug, Clone)]
pub struct NgramScorer {
    order: usize,
    k: f64,
    model_id: String,
    vocab: HashSet<String>,
    histories: HashMap<Vec<String>, History>,
    tokens: u64,
}

fn tokenize(s: &str) -> Vec<String> {
    text::words(&text::nfc(s)).into_iter().map(str::to_string).collect()
}

impl NgramScorer {
    pub fn train<S: AsRef<str>>(corpus: &[S], order: usize, k: f64) -> Result<Self, NgramError> {
        if order < 1 {
            return Err(NgramError::Order(order));
        }
        if !(k > 0.0 && k.is_finite()) {
            return Err(NgramError::Smoothing(k));
        }
        let mut vocab = HashSet::new();
        let mut histories: HashMap<Vec<String>, History> = HashMap::new();
        let mut tokens = 0;
        for sentence in corpus {
            let words = tokenize(sentence.as_ref());
            let mut padded = vec![BOS.to_string(); order - 1];
            padded.extend(words.iter().cloned());
            for i in order - 1..padded.len() {
                let h = histories.entry(padded[i + 1 - order..i].to_vec()).or_default();
                h.total += 1;
                *h.next.entry(padded[i].clone()).or_default() += 1;
            }
            tokens += words.len() as u64;
            vocab.extend(words);
        }
        if tokens == 0 {
            return Err(NgramError::EmptyCorpus);
        }
        Ok(Self {
            order,
            k,
            model_id: format!("ngram-{order}"),
            vocab,
            histories,
            tokens,
        })
    }

    pub fn with_model_id(mut self, id: impl Into<String>) -> Self {
        self.model_id = id.into();
        self
    }

    /// Smoothing denominator size: training types plus the unknown symbol.
    pub fn vocab_size(&self) -> usize {
        self.vocab.len() + 1
    }

    fn known(&self, w: String) -> String {
        if self.vocab.contains(&w) {
            w
        } else {
            UNK.to_string()
        }
    }

    /// `log P(word | history)`; both are mapped to `<unk>` when unseen.
    pub fn log_prob(&self, history: &[String], word: &str) -> f64 {
        let word = self.known(word.to_string());
        let (c_hw, c_h) = match self.histories.get(history) {
            Some(h) => (h.next.get(&word).copied().unwrap_or(0), h.total),
            None => (0, 0),
        };
        ((c_hw as f64 + self.k) / (c_h as f64 + self.k * self.vocab_size() as f64)).ln()
    }
}

impl Scorer for NgramScorer {
    fn info(&self) -> ScorerInfo {
        ScorerInfo {
            model_id: self.model_id.clone(),
            descriptor: format!(
                "ngram order={} k={} vocab={} tokens={} tokenizer=whitespace-nfc",
                self.order,
                self.k,
                self.vocab_size(),
                self.tokens
            ),
            single_threaded: false,
            batch_size: DEFAULT_BATCH,
        }
    }

    fn score(&self, condition: &str, target: &str) -> Result<f64, ScoreError> {
        let target = tokenize(target);
        if target.is_empty() {
            return Err(ScoreError::Other("empty target".into()));
        }
        let mut context = vec![BOS.to_string(); self.order - 1];
        context.extend(tokenize(condition).into_iter().map(|w| self.known(w)));
        let mut total = 0.0;
        for w in target {
            let h = &context[context.len() + 1 - self.order..];
            total += self.log_prob(h, &w);
            context.push(self.known(w));
        }
        Ok(total)
    }
}
