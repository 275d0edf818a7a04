use super::*;
use crate::lexicon::{load_lexicon, LoadOptions};
use crate::resources;

fn morph() -> Morphology {
    Morphology::load_dir(resources::default_lexicon_dir()).unwrap()
}

fn lexicon(language: Language) -> crate::lexicon::Lexicon {
    load_lexicon(
        resources::lexicon_path(&resources::default_lexicon_dir(), language),
        LoadOptions::default(),
    )
    .unwrap()
}

fn basque_noun(lemma: &str) -> LexicalEntry {
    lexicon(Language::Basque).get(Category::Noun, lemma).unwrap().clone()
}

#[test]
fn basque_case_goldens() {
    let m = morph();
    let salesman = basque_noun("saltzaile");
    let tomato = basque_noun("tomate");
    assert_eq!(
        m.basque_case_mark(&salesman, CaseSpec::new(Case::Ergative, Number::Sg))
            .unwrap(),
        "saltzaileak"
    );
    assert_eq!(
        m.basque_case_mark(&tomato, CaseSpec::new(Case::Absolutive, Number::Pl))
            .unwrap(),
        "tomateak"
    );
}

#[test]
fn basque_dative_matches_hand_table() {
    // Transcribed by hand from a reference grammar, not from the case table.
    let oracle = [
        ("ume", "umeari", "umeei"),
        ("gizon", "gizonari", "gizonei"),
        ("lagun", "lagunari", "lagunei"),
        ("irakasle", "irakasleari", "irakasleei"),
        ("mutil", "mutilari", "mutilei"),
        ("saltzaile", "saltzaileari", "saltzaileei"),
        ("artzain", "artzainari", "artzainei"),
        ("sukaldari", "sukaldariari", "sukaldariei"),
    ];
    let m = morph();
    for (lemma, sg, pl) in oracle {
        let e = basque_noun(lemma);
        assert_eq!(
            m.basque_case_mark(&e, CaseSpec::new(Case::Dative, Number::Sg)).unwrap(),
            sg
        );
        assert_eq!(
            m.basque_case_mark(&e, CaseSpec::new(Case::Dative, Number::Pl)).unwrap(),
            pl
        );
    }
}

#[test]
fn basque_case_needs_stem_final() {
    let mut e = basque_noun("ume");
    e.features.remove("stem_final");
    let err = morph()
        .basque_case_mark(&e, CaseSpec::new(Case::Ergative, Number::Sg))
        .unwrap_err();
    assert!(matches!(err, MorphologyError::MissingFeature { ref feature, .. } if feature == "stem_final"));
}

fn s_do(subject: Number, object: Number) -> BasqueAuxKey {
    BasqueAuxKey {
        paradigm: Paradigm::S_DO,
        tense: Tense::Past,
        subject,
        direct_object: Some(object),
        indirect_object: None,
    }
}

#[test]
fn basque_auxiliary_goldens() {
    let m = morph();
    assert_eq!(m.basque_auxiliary(&s_do(Number::Sg, Number::Pl)).unwrap(), "zituen");
    assert_eq!(m.basque_auxiliary(&s_do(Number::Sg, Number::Sg)).unwrap(), "zuen");
}

#[test]
fn basque_auxiliary_missing_key_names_it() {
    let text = r#"{"schema_version": 1, "table": "basque_auxiliary", "forms": [
        {"paradigm": "S_IO_DO", "tense": "past", "subject": "sg", "direct_object": "sg", "indirect_object": "sg", "form": "zion"}]}"#;
    let table = BasqueAuxTable::from_json_str(text).unwrap();
    let key = BasqueAuxKey {
        paradigm: Paradigm::S_IO_DO,
        tense: Tense::Past,
        subject: Number::Pl,
        direct_object: Some(Number::Sg),
        indirect_object: Some(Number::Pl),
    };
    let err = table.lookup(&key).unwrap_err();
    let msg = err.to_string();
    assert!(
        msg.contains("S_IO_DO") && msg.contains("S=pl") && msg.contains("DO=sg") && msg.contains("IO=pl"),
        "{msg}"
    );
    assert_eq!(table.missing_keys().len(), 35);
}

#[test]
fn ill_formed_aux_key_is_rejected() {
    let key = BasqueAuxKey {
        paradigm: Paradigm::S,
        tense: Tense::Past,
        subject: Number::Sg,
        direct_object: Some(Number::Sg),
        indirect_object: None,
    };
    assert!(matches!(
        morph().basque_auxiliary(&key),
        Err(MorphologyError::InvalidBundle { .. })
    ));
}

#[test]
fn auxiliary_table_is_complete() {
    let m = morph();
    assert!(
        m.basque_aux.missing_keys().is_empty(),
        "{:?}",
        m.basque_aux.missing_keys()
    );
    let expected: usize = Paradigm::ALL.iter().map(|p| 2 * (1usize << p.argument_count())).sum();
    assert_eq!(m.basque_aux.len(), expected);
    for p in Paradigm::ALL {
        for key in BasqueAuxKey::all_for(p) {
            assert!(!m.basque_auxiliary(&key).unwrap().is_empty());
        }
    }
}

#[test]
fn aux_forms_distinguish_every_argument_number() {
    // Flipping any one argument's number must change the auxiliary, or the
    // corresponding suites could not contrast.
    let m = morph();
    for p in Paradigm::ALL {
        for key in BasqueAuxKey::all_for(p) {
            let base = m.basque_auxiliary(&key).unwrap();
            let mut flips = vec![BasqueAuxKey {
                subject: key.subject.flipped(),
                ..key
            }];
            if let Some(n) = key.direct_object {
                flips.push(BasqueAuxKey {
                    direct_object: Some(n.flipped()),
                    ..key
                });
            }
            if let Some(n) = key.indirect_object {
                flips.push(BasqueAuxKey {
                    indirect_object: Some(n.flipped()),
                    ..key
                });
            }
            for f in flips {
                assert_ne!(m.basque_auxiliary(&f).unwrap(), base, "{key} vs {f}");
            }
        }
    }
}

fn slot(kind: ConcordSlotKind, class: u8) -> SwahiliConcordSlot {
    SwahiliConcordSlot::new(kind, class)
}

#[test]
fn swahili_concord_goldens() {
    let m = morph();
    assert_eq!(
        m.swahili_concord(slot(ConcordSlotKind::OfPreposition, 10), "").unwrap(),
        "za"
    );
    assert_eq!(
        m.swahili_concord(slot(ConcordSlotKind::AdjectivePrefix, 10), "-ekundu")
            .unwrap(),
        "nyekundu"
    );
    assert_eq!(
        m.swahili_concord(slot(ConcordSlotKind::AdjectivePrefix, 2), "-ekundu")
            .unwrap(),
        "wekundu"
    );
    assert_eq!(
        m.swahili_concord(slot(ConcordSlotKind::Demonstrative, 2), "").unwrap(),
        "hawa"
    );
    assert_eq!(
        m.swahili_concord(slot(ConcordSlotKind::AdjectivePrefix, 2), "zee")
            .unwrap(),
        "wazee"
    );
    assert_eq!(
        m.swahili_concord(slot(ConcordSlotKind::NounPrefix, 2), "anasayansi")
            .unwrap(),
        "wanasayansi"
    );
}

#[test]
fn swahili_fusion_rules() {
    let m = morph();
    let adj = |class, stem| {
        m.swahili_concord(slot(ConcordSlotKind::AdjectivePrefix, class), stem)
            .unwrap()
    };
    assert_eq!(adj(9, "refu"), "ndefu");
    assert_eq!(adj(10, "baya"), "mbaya");
    assert_eq!(adj(10, "zuri"), "nzuri");
    assert_eq!(adj(10, "kubwa"), "kubwa");
    assert_eq!(adj(10, "pya"), "mpya");
    assert_eq!(adj(1, "ekundu"), "mwekundu");
    assert_eq!(adj(7, "dogo"), "kidogo");
}

#[test]
fn missing_concord_cell_is_an_error() {
    let err = morph()
        .swahili_concord(slot(ConcordSlotKind::Demonstrative, 15), "")
        .unwrap_err();
    assert_eq!(
        err,
        MorphologyError::MissingConcord(slot(ConcordSlotKind::Demonstrative, 15))
    );
}

#[test]
fn concord_output_starts_with_prefix_or_is_an_exception() {
    let m = morph();
    let stems = [
        "ekundu", "zee", "refu", "kubwa", "anguka", "imba", "pya", "oza", "dogo", "baya",
    ];
    for s in m.swahili_concord.slots() {
        let entry = m.swahili_concord.entry(s).unwrap();
        for stem in stems {
            let out = m.swahili_concord(s, stem).unwrap();
            if let Some(form) = entry.exceptions.get(stem) {
                assert_eq!(&out, form);
                continue;
            }
            let rule = entry.rule_for(stem).unwrap();
            assert!(out.starts_with(&rule.prefix), "{s} {stem} -> {out}");
        }
    }
}

#[test]
fn swahili_past_verbs() {
    let m = morph();
    let t = &m.swahili_concord;
    assert_eq!(t.past_verb(10, SWAHILI_PAST, "anguka", false).unwrap(), "zilianguka");
    assert_eq!(t.past_verb(2, SWAHILI_PAST, "anguka", false).unwrap(), "walianguka");
    assert_eq!(t.past_verb(2, SWAHILI_PAST, "ruka", true).unwrap(), "walioruka");
    assert_eq!(t.past_verb(1, SWAHILI_PAST, "cheka", true).unwrap(), "aliyecheka");
}

#[test]
fn swahili_agreement_class_prefers_override() {
    let lex = lexicon(Language::Swahili);
    let dogs = lex.get(Category::Noun, "bwa").unwrap();
    assert_eq!(dogs.feature("noun_class"), Some("10"));
    assert_eq!(swahili_agreement_class(dogs).unwrap(), 2);
    let houses = lex.get(Category::Noun, "umba").unwrap();
    assert_eq!(swahili_agreement_class(houses).unwrap(), 10);
}

#[test]
fn hindi_listed_forms() {
    let lex = lexicon(Language::Hindi);
    let eat = lex.get(Category::Verb, "खा").unwrap();
    let m = morph();
    let bundle = |aspect| {
        FeatureBundle::new()
            .with("aspect", aspect)
            .with("gender", "m")
            .with("number", "sg")
            .with("tense", "prs")
    };
    assert_eq!(m.inflect(eat, &bundle("hab")).unwrap(), "खाता है");
    assert_eq!(m.inflect(eat, &bundle("pfv")).unwrap(), "खाया है");
    for (key, form) in &eat.forms {
        let b = FeatureBundle::parse(key).unwrap();
        assert_eq!(&m.inflect(eat, &b).unwrap(), form);
    }
}

#[test]
fn inflect_without_form_or_rule_names_entry_and_bundle() {
    let lex = lexicon(Language::Hindi);
    let eat = lex.get(Category::Verb, "खा").unwrap();
    let b = FeatureBundle::new().with("aspect", "prog");
    let err = morph().inflect(eat, &b).unwrap_err();
    let msg = err.to_string();
    assert!(msg.contains("hindi:verb:खा") && msg.contains("aspect=prog"), "{msg}");
}

#[test]
fn inflect_uses_rules_for_swahili_and_basque() {
    let m = morph();
    let sw = lexicon(Language::Swahili);
    let scientist = sw.get(Category::Noun, "anasayansi").unwrap();
    assert_eq!(
        m.inflect(scientist, &FeatureBundle::new().with("noun_class", "2"))
            .unwrap(),
        "wanasayansi"
    );
    let stone = sw.get(Category::Noun, "we").unwrap();
    assert_eq!(
        m.inflect(stone, &FeatureBundle::new().with("noun_class", "5")).unwrap(),
        "jiwe"
    );
    let fall = sw.get(Category::Verb, "anguka").unwrap();
    let b = FeatureBundle::new()
        .with("noun_class", "10")
        .with("relative", "no")
        .with("tense", "past");
    assert_eq!(m.inflect(fall, &b).unwrap(), "zilianguka");

    let salesman = basque_noun("saltzaile");
    let b = FeatureBundle::new().with("case", "ergative").with("number", "pl");
    assert_eq!(m.inflect(&salesman, &b).unwrap(), "saltzaileek");
}

#[test]
fn shipped_tables_reject_malformed_variants() {
    let bad_header = r#"{"schema_version": 2, "table": "basque_case", "rules": []}"#;
    assert!(matches!(
        BasqueCaseTable::from_json_str(bad_header),
        Err(TableError::Header { .. })
    ));
    let incomplete = r#"{"schema_version": 1, "table": "basque_case", "rules": [
        {"case": "ergative", "number": "sg", "stem_final": "vowel", "suffix": "k"}]}"#;
    assert!(matches!(
        BasqueCaseTable::from_json_str(incomplete),
        Err(TableError::Invalid(_))
    ));
    let dup = r#"{"schema_version": 1, "table": "swahili_concord", "entries": [
        {"class": 2, "slot": "demonstrative", "prefix": "hawa"},
        {"class": 2, "slot": "demonstrative", "prefix": "hao"}]}"#;
    assert!(matches!(ConcordTable::from_json_str(dup), Err(TableError::Invalid(_))));
}
