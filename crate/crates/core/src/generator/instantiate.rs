use std::collections::{BTreeMap, HashMap};

use rand::seq::SliceRandom;
use rand::Rng;

use super::template::{admits, Alternation, CrossConstraint, Expr, Realize, Template};
use super::{split_condition_target, GenerateError, MinimalPair, ATTEMPT_BUDGET};
use crate::bundle::FeatureBundle;
use crate::lexicon::{LexicalEntry, Lexicon};
use crate::morphology::{self, BasqueAuxKey, CaseSpec, Morphology, Number, Tense, SWAHILI_PAST};
use crate::text;

/// Choices pinned instead of sampled: lemmas by role, features as
/// `ROLE.feature`, clause variables as `$name`.
#[derive(Debug, Clone, Default)]
pub struct Forced {
    pub lemmas: BTreeMap<String, String>,
    pub features: BTreeMap<String, String>,
}

impl Forced {
    pub fn lemma(mut self, role: &str, lemma: &str) -> Self {
        self.lemmas.insert(role.into(), lemma.into());
        self
    }

    pub fn feature(mut self, key: &str, value: &str) -> Self {
        self.features.insert(key.into(), value.into());
        self
    }
}

/// A template bound to its lexicon and tables, with candidate fillers
/// precomputed per slot.
pub struct Generator<'a> {
    template: &'a Template,
    lexicon: &'a Lexicon,
    morphology: &'a Morphology,
    candidates: Vec<Vec<&'a LexicalEntry>>,
    index: HashMap<&'a str, usize>,
}

struct Draw<'a> {
    clause: BTreeMap<String, String>,
    fillers: Vec<Option<&'a LexicalEntry>>,
    sampled: Vec<BTreeMap<String, String>>,
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum View {
    Grammatical,
    Ungrammatical,
}

enum Rejection {
    Constraints(Vec<usize>),
    NoContrast,
}

impl<'a> Generator<'a> {
    pub fn new(
        template: &'a Template,
        lexicon: &'a Lexicon,
        morphology: &'a Morphology,
    ) -> Result<Self, GenerateError> {
        if template.language != lexicon.language {
            return Err(GenerateError::LanguageMismatch {
                suite: template.suite_name.clone(),
                template: template.language,
                lexicon: lexicon.language,
            });
        }
        let mut candidates = Vec::with_capacity(template.slots.len());
        for slot in &template.slots {
            let found = match slot.category {
                None => Vec::new(),
                Some(category) => {
                    let found = lexicon
                        .query_entries(category, &slot.lexical_constraints())
                        .map_err(|e| GenerateError::NoCandidates {
                            suite: template.suite_name.clone(),
                            role: slot.role.clone(),
                            reason: e.to_string(),
                        })?;
                    if found.is_empty() {
                        return Err(GenerateError::NoCandidates {
                            suite: template.suite_name.clone(),
                            role: slot.role.clone(),
                            reason: format!("no {category} matches the slot constraints"),
                        });
                    }
                    found
                }
            };
            candidates.push(found);
        }
        let index = template
            .slots
            .iter()
            .enumerate()
            .map(|(i, s)| (s.role.as_str(), i))
            .collect();
        Ok(Self {
            template,
            lexicon,
            morphology,
            candidates,
            index,
        })
    }

    pub fn template(&self) -> &'a Template {
        self.template
    }

    pub fn lexicon(&self) -> &'a Lexicon {
        self.lexicon
    }

    fn suite(&self) -> String {
        self.template.suite_name.clone()
    }

    /// One constraint-satisfying pair, resampling up to [`ATTEMPT_BUDGET`]
    /// times.
    pub fn instantiate<R: Rng>(&self, rng: &mut R, id: u32, forced: &Forced) -> Result<MinimalPair, GenerateError> {
        let mut failures = vec![0usize; self.template.cross_constraints.len()];
        let mut no_contrast = 0usize;
        for _ in 0..ATTEMPT_BUDGET {
            let draw = self.draw(rng, forced)?;
            match self.build(&draw, id)? {
                Ok(pair) => return Ok(pair),
                Err(Rejection::Constraints(failed)) => failed.into_iter().for_each(|i| failures[i] += 1),
                Err(Rejection::NoContrast) => no_contrast += 1,
            }
        }
        let worst = failures.iter().enumerate().max_by_key(|(_, n)| **n);
        let constraint = match worst {
            Some((i, n)) if *n >= no_contrast => self.template.cross_constraints[i].to_string(),
            _ => "grammatical and ungrammatical targets differ".to_string(),
        };
        Err(GenerateError::Unsatisfiable {
            suite: self.suite(),
            constraint,
            attempts: ATTEMPT_BUDGET,
        })
    }

    fn draw<R: Rng>(&self, rng: &mut R, forced: &Forced) -> Result<Draw<'a>, GenerateError> {
        let bad = |key: &str, value: &str| GenerateError::BadForcedChoice {
            suite: self.suite(),
            key: key.to_string(),
            value: value.to_string(),
        };
        let mut clause = BTreeMap::new();
        for (name, values) in &self.template.clause {
            let key = format!("${name}");
            let value = match forced.features.get(&key) {
                Some(v) if values.contains(v) => v.clone(),
                Some(v) => return Err(bad(&key, v)),
                None => values.choose(rng).expect("validated non-empty").clone(),
            };
            clause.insert(name.clone(), value);
        }
        let mut fillers = Vec::with_capacity(self.template.slots.len());
        let mut sampled = Vec::with_capacity(self.template.slots.len());
        for (slot, cands) in self.template.slots.iter().zip(&self.candidates) {
            let filler = if cands.is_empty() {
                None
            } else if let Some(lemma) = forced.lemmas.get(&slot.role) {
                let e = cands
                    .iter()
                    .find(|e| &e.lemma == lemma)
                    .ok_or_else(|| bad(&slot.role, lemma))?;
                Some(*e)
            } else {
                Some(*cands.choose(rng).expect("non-empty"))
            };
            let mut values = BTreeMap::new();
            for (name, options) in &slot.sample {
                let key = format!("{}.{name}", slot.role);
                let value = match forced.features.get(&key) {
                    Some(v) if options.contains(v) => v.clone(),
                    Some(v) => return Err(bad(&key, v)),
                    None => options.choose(rng).expect("validated non-empty").clone(),
                };
                values.insert(name.clone(), value);
            }
            fillers.push(filler);
            sampled.push(values);
        }
        Ok(Draw {
            clause,
            fillers,
            sampled,
        })
    }

    fn lookup<'d>(&self, draw: &'d Draw<'a>, role: &str, feature: &str) -> Option<&'d str> {
        let i = *self.index.get(role)?;
        if let Some(v) = draw.sampled[i].get(feature) {
            return Some(v);
        }
        let entry = draw.fillers[i]?;
        if feature == "lemma" {
            return Some(&entry.lemma);
        }
        entry.feature(feature)
    }

    /// Indices of every violated cross constraint.
    fn check(&self, draw: &Draw<'a>) -> Vec<usize> {
        let mut failed = Vec::new();
        for (i, c) in self.template.cross_constraints.iter().enumerate() {
            let ok = match c {
                CrossConstraint::Differ { feature, focus, others } => {
                    let f = self.lookup(draw, focus, feature);
                    f.is_some() && others.iter().all(|o| self.lookup(draw, o, feature) != f)
                }
                CrossConstraint::Selects {
                    head,
                    head_feature,
                    dependent,
                    dependent_feature,
                } => match (
                    self.lookup(draw, head, head_feature),
                    self.lookup(draw, dependent, dependent_feature),
                ) {
                    (Some(set), Some(value)) => admits(set, value),
                    _ => false,
                },
                CrossConstraint::Distinct { roles } => {
                    let lemmas: Vec<_> = roles.iter().map(|r| self.lookup(draw, r, "lemma")).collect();
                    (0..lemmas.len()).all(|a| (a + 1..lemmas.len()).all(|b| lemmas[a] != lemmas[b]))
                }
            };
            if !ok {
                failed.push(i);
            }
        }
        failed
    }

    /// Controller role seen from `view`: the ungrammatical target agrees
    /// with the attractor instead.
    fn controller<'s>(&'s self, role: &'s str, view: View) -> &'s str {
        match (&self.template.target.alternation, view) {
            (Alternation::Controller { from, to }, View::Ungrammatical) if from == role => to,
            _ => role,
        }
    }

    fn resolve(&self, draw: &Draw<'a>, role: &str, expr: &str, view: View) -> Result<String, GenerateError> {
        let unresolved = || GenerateError::Unresolved {
            suite: self.suite(),
            role: role.to_string(),
            expr: expr.to_string(),
        };
        match Expr::parse(expr) {
            Expr::Literal(s) => Ok(s.to_string()),
            Expr::Variable(name) => match &self.template.target.alternation {
                Alternation::Variable {
                    name: alt,
                    grammatical,
                    ungrammatical,
                } if alt == name => Ok(match view {
                    View::Grammatical => grammatical.clone(),
                    View::Ungrammatical => ungrammatical.clone(),
                }),
                _ => draw.clause.get(name).cloned().ok_or_else(unresolved),
            },
            Expr::Feature { role: source, feature } => {
                let source = self.controller(source, view);
                let value = self.lookup(draw, source, feature).ok_or_else(unresolved)?;
                self.flip(source, feature, value, view).ok_or_else(unresolved)
            }
        }
    }

    fn flip(&self, role: &str, feature: &str, value: &str, view: View) -> Option<String> {
        match (&self.template.target.alternation, view) {
            (Alternation::FlipNumber { argument }, View::Ungrammatical) if argument == role && feature == "number" => {
                Number::parse(value).map(|n| n.flipped().as_str().to_string())
            }
            _ => Some(value.to_string()),
        }
    }

    fn number(&self, draw: &Draw<'a>, slot_role: &str, arg: &str, view: View) -> Result<Number, GenerateError> {
        let expr = format!("@{arg}.number");
        let v = self.resolve(draw, slot_role, &expr, view)?;
        Number::parse(&v).ok_or(GenerateError::Unresolved {
            suite: self.suite(),
            role: slot_role.to_string(),
            expr,
        })
    }

    fn agreement_class(
        &self,
        draw: &Draw<'a>,
        slot_role: &str,
        controller: &str,
        view: View,
    ) -> Result<u8, GenerateError> {
        let controller = self.controller(controller, view);
        let entry = self
            .index
            .get(controller)
            .and_then(|&i| draw.fillers[i])
            .ok_or_else(|| GenerateError::Unresolved {
                suite: self.suite(),
                role: slot_role.to_string(),
                expr: controller.to_string(),
            })?;
        morphology::swahili_agreement_class(entry).map_err(|source| self.morph_err(slot_role, source))
    }

    fn morph_err(&self, role: &str, source: morphology::MorphologyError) -> GenerateError {
        GenerateError::Morphology {
            suite: self.suite(),
            role: role.to_string(),
            source,
        }
    }

    fn realize(&self, draw: &Draw<'a>, slot_index: usize, view: View) -> Result<String, GenerateError> {
        let slot = &self.template.slots[slot_index];
        let role = slot.role.as_str();
        let entry = draw.fillers[slot_index];
        let need_entry = || {
            entry.ok_or_else(|| GenerateError::Unresolved {
                suite: self.suite(),
                role: role.to_string(),
                expr: "lexical filler".into(),
            })
        };
        let m = self.morphology;
        match &slot.realize {
            Realize::Lemma => Ok(need_entry()?.lemma.clone()),
            Realize::Literal { text } => Ok(text.clone()),
            Realize::Inflect { bundle } => {
                let mut b = FeatureBundle::new();
                for (k, expr) in bundle {
                    b.insert(k.clone(), self.resolve(draw, role, expr, view)?);
                }
                m.inflect(need_entry()?, &b).map_err(|e| self.morph_err(role, e))
            }
            Realize::BasqueCase { case } => {
                let number = self.number(draw, role, role, view)?;
                m.basque_case_mark(need_entry()?, CaseSpec::new(*case, number))
                    .map_err(|e| self.morph_err(role, e))
            }
            Realize::BasqueAux {
                paradigm,
                subject,
                direct_object,
                indirect_object,
                tense,
            } => {
                let tense_value = self.resolve(draw, role, tense, view)?;
                let tense = Tense::parse(&tense_value).ok_or_else(|| GenerateError::Unresolved {
                    suite: self.suite(),
                    role: role.to_string(),
                    expr: tense_value.clone(),
                })?;
                let opt = |arg: &Option<String>| -> Result<Option<Number>, GenerateError> {
                    arg.as_deref().map(|a| self.number(draw, role, a, view)).transpose()
                };
                let key = BasqueAuxKey {
                    paradigm: *paradigm,
                    tense,
                    subject: self.number(draw, role, subject, view)?,
                    direct_object: opt(direct_object)?,
                    indirect_object: opt(indirect_object)?,
                };
                m.basque_auxiliary(&key).map_err(|e| self.morph_err(role, e))
            }
            Realize::SwahiliConcord { concord, controller } => {
                let class = self.agreement_class(draw, role, controller, view)?;
                let stem = entry.map(|e| e.lemma.as_str()).unwrap_or("");
                m.swahili_concord(morphology::SwahiliConcordSlot::new(*concord, class), stem)
                    .map_err(|e| self.morph_err(role, e))
            }
            Realize::SwahiliVerb { controller, relative } => {
                let class = self.agreement_class(draw, role, controller, view)?;
                m.swahili_concord
                    .past_verb(class, SWAHILI_PAST, &need_entry()?.lemma, *relative)
                    .map_err(|e| self.morph_err(role, e))
            }
        }
    }

    fn sentence(&self, mut words: Vec<String>) -> String {
        let language = self.template.language;
        if language.capitalizes() {
            if let Some(first) = words.first_mut() {
                *first = text::capitalize_first(first);
            }
        }
        if let Some(last) = words.last_mut() {
            last.push_str(language.full_stop());
        }
        words.join(" ")
    }

    /// Outer error: template or table defect (fatal). Inner error: this
    /// draw is rejected and another one is tried.
    fn build(&self, draw: &Draw<'a>, id: u32) -> Result<Result<MinimalPair, Rejection>, GenerateError> {
        let failed = self.check(draw);
        if !failed.is_empty() {
            return Ok(Err(Rejection::Constraints(failed)));
        }
        let target = self.template.target_index();
        let mut words = Vec::with_capacity(self.template.slots.len());
        for i in 0..self.template.slots.len() {
            words.push(self.realize(draw, i, View::Grammatical)?);
        }
        let bad_word = self.realize(draw, target, View::Ungrammatical)?;
        if bad_word == words[target] {
            return Ok(Err(Rejection::NoContrast));
        }
        let mut bad_words = words.clone();
        bad_words[target] = bad_word;
        let good = self.sentence(words);
        let bad = self.sentence(bad_words);
        let (condition, grammatical_target, ungrammatical_target) =
            split_condition_target(&good, &bad).map_err(|source| GenerateError::Malformed {
                suite: self.suite(),
                source,
            })?;
        Ok(Ok(MinimalPair {
            id,
            condition,
            grammatical_target,
            ungrammatical_target,
            metadata: self.metadata(draw),
        }))
    }

    fn metadata(&self, draw: &Draw<'a>) -> BTreeMap<String, String> {
        let mut md = BTreeMap::new();
        for (name, value) in &draw.clause {
            md.insert(format!("clause.{name}"), value.clone());
        }
        for (i, slot) in self.template.slots.iter().enumerate() {
            if let Some(e) = draw.fillers[i] {
                md.insert(format!("{}.lemma", slot.role), e.lemma.clone());
                for (k, v) in &e.features {
                    md.insert(format!("{}.{k}", slot.role), v.clone());
                }
            }
            for (k, v) in &draw.sampled[i] {
                md.insert(format!("{}.{k}", slot.role), v.clone());
            }
            if let Realize::BasqueAux {
                subject,
                direct_object,
                indirect_object,
                ..
            } = &slot.realize
            {
                let args: Vec<&str> = std::iter::once(subject.as_str())
                    .chain(indirect_object.as_deref())
                    .chain(direct_object.as_deref())
                    .collect();
                md.insert("arguments".into(), args.join(","));
            }
        }
        let alt = &self.template.target.alternation;
        md.insert("alternation".into(), alt.describe());
        match alt {
            Alternation::FlipNumber { argument } => {
                md.insert("focus".into(), argument.clone());
            }
            Alternation::Controller { from, to } => {
                md.insert("focus".into(), from.clone());
                md.insert("attractor".into(), to.clone());
            }
            Alternation::Variable {
                name,
                grammatical,
                ungrammatical,
            } => {
                md.insert(format!("grammatical.{name}"), grammatical.clone());
                md.insert(format!("ungrammatical.{name}"), ungrammatical.clone());
            }
        }
        md
    }
}
