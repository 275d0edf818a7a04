use std::collections::{BTreeMap, BTreeSet};
use std::sync::atomic::{AtomicUsize, Ordering};

use proptest::prelude::*;

use super::file::check_pair_ids;
use super::*;
use crate::lang::Language;

fn pair(id: u32, condition: &str, g: &str, u: &str) -> MinimalPair {
    MinimalPair {
        id,
        condition: condition.into(),
        grammatical_target: g.into(),
        ungrammatical_target: u.into(),
        metadata: BTreeMap::new(),
    }
}

fn suite(pairs: Vec<MinimalPair>) -> TestSuite {
    TestSuite {
        name: "basque-DO-S_DO_V_AUX".into(),
        language: Language::Basque,
        template_id: "basque-DO-S_DO_V_AUX".into(),
        seed: 0,
        validated: true,
        pairs,
    }
}

fn mock() -> CharCountScorer {
    CharCountScorer {
        model_id: "mock".into(),
    }
}

#[test]
fn bigram_add_one_matches_hand_count() {
    let m = NgramScorer::train(&["a b", "a b"], 2, 1.0).unwrap();
    // Types {a, b} plus the unknown symbol.
    assert_eq!(m.vocab_size(), 3);
    // c(a b) = 2, c(a) = 2: (2 + 1) / (2 + 1 * 3).
    let expected = (3.0f64 / 5.0).ln();
    assert_eq!(m.score("a", "b").unwrap(), expected);
    // Unseen continuation of a seen history: (0 + 1) / (2 + 3).
    assert_eq!(m.score("a", "a").unwrap(), (1.0f64 / 5.0).ln());
    // Unseen history: uniform 1 / V.
    assert_eq!(m.score("b", "a").unwrap(), (1.0f64 / 3.0).ln());
}

#[test]
fn unigram_ignores_context() {
    let m = NgramScorer::train(&["x y y"], 1, 0.5).unwrap();
    // c(y) = 2 of 3 tokens, V = 3.
    let expected = ((2.0 + 0.5) / (3.0 + 0.5 * 3.0f64)).ln();
    assert_eq!(m.score("anything at all", "y").unwrap(), expected);
    assert_eq!(m.score("", "y").unwrap(), expected);
}

#[test]
fn unknown_words_share_the_unknown_symbol() {
    let m = NgramScorer::train(&["a b c"], 2, 0.1).unwrap();
    assert_eq!(m.score("a", "zz").unwrap(), m.score("a", "qq").unwrap());
}

#[test]
fn ngram_input_is_normalized() {
    let m = NgramScorer::train(&["\u{0921}\u{093C} x"], 2, 1.0).unwrap();
    assert_eq!(
        m.score("\u{095C}", "x").unwrap(),
        m.score("\u{0921}\u{093C}", "x").unwrap()
    );
}

#[test]
fn ngram_rejects_bad_parameters() {
    assert_eq!(NgramScorer::train(&["a"], 0, 1.0).unwrap_err(), NgramError::Order(0));
    assert_eq!(
        NgramScorer::train(&["a"], 2, 0.0).unwrap_err(),
        NgramError::Smoothing(0.0)
    );
    assert!(matches!(
        NgramScorer::train(&["a"], 2, f64::NAN),
        Err(NgramError::Smoothing(_))
    ));
    assert_eq!(
        NgramScorer::train(&["  ", ""], 2, 1.0).unwrap_err(),
        NgramError::EmptyCorpus
    );
    let m = NgramScorer::train(&["a"], 2, 1.0).unwrap();
    assert!(m.score("a", "  ").is_err());
}

fn word() -> impl Strategy<Value = String> {
    prop::sample::select(vec!["a", "b", "c", "d", "zz"]).prop_map(str::to_string)
}

fn sentence() -> impl Strategy<Value = String> {
    prop::collection::vec(word(), 1..6).prop_map(|w| w.join(" "))
}

proptest! {
    #[test]
    fn ngram_chain_rule(
        corpus in prop::collection::vec(sentence(), 1..8),
        order in 1usize..4,
        k in 0.01f64..2.0,
        c in sentence(),
        t1 in sentence(),
        t2 in sentence(),
    ) {
        let m = NgramScorer::train(&corpus, order, k).unwrap();
        let whole = m.score(&c, &format!("{t1} {t2}")).unwrap();
        let parts = m.score(&c, &t1).unwrap() + m.score(&format!("{c} {t1}"), &t2).unwrap();
        prop_assert!((whole - parts).abs() <= 1e-9 * whole.abs().max(1.0));
    }

    #[test]
    fn ngram_scores_are_log_probabilities(
        corpus in prop::collection::vec(sentence(), 1..8),
        order in 1usize..4,
        k in 0.01f64..2.0,
        c in sentence(),
        t in sentence(),
        extra in word(),
    ) {
        let m = NgramScorer::train(&corpus, order, k).unwrap();
        let s = m.score(&c, &t).unwrap();
        prop_assert!(s <= 0.0);
        // V >= 2, so every conditional is < 1 and appending lowers the total.
        let longer = m.score(&c, &format!("{t} {extra}")).unwrap();
        prop_assert!(longer < s);
        prop_assert_eq!(s.to_bits(), m.score(&c, &t).unwrap().to_bits());
    }

    #[test]
    fn ngram_distribution_sums_to_one(corpus in prop::collection::vec(sentence(), 1..8), k in 0.01f64..2.0, c in sentence()) {
        let m = NgramScorer::train(&corpus, 2, k).unwrap();
        let types: BTreeSet<String> = corpus.iter().flat_map(|s| s.split(' ').map(str::to_string)).collect();
        let mut total: f64 = types.iter().map(|w| m.score(&c, w).unwrap().exp()).sum();
        total += m.score(&c, "<never-seen>").unwrap().exp();
        prop_assert!((total - 1.0).abs() < 1e-9);
    }
}

#[test]
fn length_mock_prefers_shorter_targets() {
    let p = pair(0, "Saltzaileak tomateak prestatu", "zituen.", "zuen.");
    let s = score_pair(&mock(), &p).unwrap();
    assert_eq!((s.logp_grammatical, s.logp_ungrammatical), (-7.0, -5.0));
    assert!(!s.correct);
}

#[test]
fn ties_are_incorrect() {
    assert!(!ScoredPair::new(0, -3.0, -3.0).correct);
    assert!(ScoredPair::new(0, -2.0, -3.0).correct);
}

struct Prefers(&'static str);

impl Scorer for Prefers {
    fn info(&self) -> ScorerInfo {
        ScorerInfo {
            model_id: "prefers".into(),
            descriptor: "test".into(),
            single_threaded: false,
            batch_size: 2,
        }
    }

    fn score(&self, _: &str, target: &str) -> Result<f64, ScoreError> {
        Ok(if target == self.0 { -1.0 } else { -2.0 })
    }
}

#[test]
fn scorer_preferring_the_grammatical_target_is_correct() {
    let p = pair(0, "Saltzaileak tomateak prestatu", "zituen.", "zuen.");
    assert!(score_pair(&Prefers("zituen."), &p).unwrap().correct);
}

#[test]
fn suite_scores_do_not_depend_on_concurrency() {
    let s = suite(vec![
        pair(0, "x", "aa", "a"),
        pair(1, "x", "a", "aa"),
        pair(2, "x", "bbb", "bb"),
        pair(3, "x", "b", "bbbb"),
    ]);
    let one = score_suite(&mock(), &s, 1).unwrap();
    let four = score_suite(&mock(), &s, 4).unwrap();
    assert_eq!(one, four);
    assert_eq!(one.k_correct(), 2);
    assert_eq!(one.scored.iter().map(|p| p.pair_id).collect::<Vec<_>>(), [0, 1, 2, 3]);
}

#[test]
fn thousand_pairs_thousand_scores() {
    let s = suite((0..1000).map(|i| pair(i, "c", "t", "tt")).collect());
    let scores = score_suite(&mock(), &s, 8).unwrap();
    assert_eq!(scores.n(), 1000);
    assert_eq!(scores.k_correct(), 1000);
}

#[test]
fn empty_suite_is_rejected() {
    assert_eq!(
        score_suite(&mock(), &suite(vec![]), 1),
        Err(ScoringError::EmptySuite("basque-DO-S_DO_V_AUX".into()))
    );
}

/// Fails on targets containing "boom"; counts concurrent calls.
struct Flaky {
    single: bool,
    active: AtomicUsize,
    peak: AtomicUsize,
}

impl Scorer for Flaky {
    fn info(&self) -> ScorerInfo {
        ScorerInfo {
            model_id: "flaky".into(),
            descriptor: "flaky".into(),
            single_threaded: self.single,
            batch_size: 2,
        }
    }

    fn score(&self, _: &str, target: &str) -> Result<f64, ScoreError> {
        let now = self.active.fetch_add(1, Ordering::SeqCst) + 1;
        self.peak.fetch_max(now, Ordering::SeqCst);
        std::thread::sleep(std::time::Duration::from_millis(2));
        self.active.fetch_sub(1, Ordering::SeqCst);
        if target.contains("boom") {
            Err(ScoreError::Other("boom".into()))
        } else if target == "nan" {
            Ok(f64::NAN)
        } else {
            Ok(-1.0)
        }
    }
}

fn flaky(single: bool) -> Flaky {
    Flaky {
        single,
        active: AtomicUsize::new(0),
        peak: AtomicUsize::new(0),
    }
}

#[test]
fn partial_failures_name_the_pairs() {
    let s = suite(vec![
        pair(0, "x", "a", "b"),
        pair(1, "x", "boom", "b"),
        pair(2, "x", "a", "b"),
        pair(3, "x", "a", "nan"),
    ]);
    match score_suite(&flaky(false), &s, 4) {
        Err(ScoringError::Partial {
            failed,
            total,
            completed,
            ..
        }) => {
            assert_eq!(failed, [1, 3]);
            assert_eq!(total, 4);
            assert_eq!(completed.scored.iter().map(|p| p.pair_id).collect::<Vec<_>>(), [0, 2]);
        }
        other => panic!("{other:?}"),
    }
    let err = score_pair(&flaky(false), &s.pairs[1]).unwrap_err();
    assert_eq!(err.pair_id, 1);
    assert!(matches!(
        score_pair(&flaky(false), &s.pairs[3]).unwrap_err().source,
        ScoreError::NonFinite(_)
    ));
}

#[test]
fn single_threaded_scorers_are_never_called_concurrently() {
    let s = suite((0..32).map(|i| pair(i, "x", "a", "b")).collect());
    let f = flaky(true);
    score_suite(&f, &s, 8).unwrap();
    assert_eq!(f.peak.load(Ordering::SeqCst), 1);
}

#[test]
fn score_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let s = suite((0..5).map(|i| pair(i, "x", "ab", "abc")).collect());
    let scores = score_suite(&mock(), &s, 2).unwrap();
    let path = export_scores(&scores, dir.path()).unwrap();
    assert_eq!(path, score_file_path(dir.path(), "mock", "basque-DO-S_DO_V_AUX"));
    assert_eq!(import_scores(&path).unwrap(), scores);
    assert_eq!(find_score_files(dir.path()).unwrap(), std::slice::from_ref(&path));
    let ids: BTreeSet<u32> = (0..5).collect();
    check_pair_ids(&scores, &ids, &path).unwrap();
    let fewer: BTreeSet<u32> = (0..4).collect();
    assert!(check_pair_ids(&scores, &fewer, &path).is_err());
}

fn write_rows(rows: &[&str]) -> (tempfile::TempDir, std::path::PathBuf) {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("s.scores.jsonl");
    std::fs::write(&path, rows.join("\n")).unwrap();
    (dir, path)
}

#[test]
fn imported_flags_are_recomputed() {
    let (_d, path) = write_rows(&[
        r#"{"suite":"s","model_id":"m","pair_id":0,"logp_grammatical":-1.0,"logp_ungrammatical":-2.0,"correct":false}"#,
        r#"{"suite":"s","model_id":"m","pair_id":2,"logp_grammatical":-3.0,"logp_ungrammatical":-3.0,"correct":true}"#,
        r#"{"suite":"s","model_id":"m","pair_id":1,"logp_grammatical":-5.0,"logp_ungrammatical":-2.0}"#,
    ]);
    let s = import_scores(&path).unwrap();
    assert_eq!(s.n(), 3);
    assert_eq!(
        s.scored.iter().map(|p| (p.pair_id, p.correct)).collect::<Vec<_>>(),
        [(0, true), (1, false), (2, false)]
    );
    assert_eq!(s.scorer_descriptor, file::UNKNOWN_DESCRIPTOR);
}

#[test]
fn bad_rows_are_rejected() {
    for rows in [
        vec![r#"{"suite":"s","model_id":"m","pair_id":0,"logp_grammatical":NaN,"logp_ungrammatical":-2.0}"#],
        vec![r#"{"suite":"s","model_id":"m","pair_id":0,"logp_grammatical":-1.0}"#],
        vec![r#"{"suite":"s","model_id":"m","pair_id":0,"logp_grammatical":-1.0,"logp_ungrammatical":-2.0,"x":1}"#],
        vec![
            r#"{"suite":"s","model_id":"m","pair_id":0,"logp_grammatical":-1.0,"logp_ungrammatical":-2.0}"#,
            r#"{"suite":"s","model_id":"m","pair_id":0,"logp_grammatical":-1.0,"logp_ungrammatical":-2.0}"#,
        ],
        vec![
            r#"{"suite":"s","model_id":"m","pair_id":0,"logp_grammatical":-1.0,"logp_ungrammatical":-2.0}"#,
            r#"{"suite":"t","model_id":"m","pair_id":1,"logp_grammatical":-1.0,"logp_ungrammatical":-2.0}"#,
        ],
        vec![""],
    ] {
        let (_d, path) = write_rows(&rows);
        assert!(import_scores(&path).is_err(), "{rows:?}");
    }
}

#[test]
fn mode_names() {
    for m in [Mode::Causal, Mode::MaskedPll, Mode::Mock] {
        assert_eq!(m.as_str().parse::<Mode>().unwrap(), m);
        assert_eq!(serde_json::to_string(&m).unwrap(), format!("\"{m}\""));
    }
    assert!("greedy".parse::<Mode>().is_err());
}
