//! Suite templates: sentence skeletons with typed slots.
//!
//! Values inside realization rules are small expressions:
//! `@ROLE.feature` reads a sampled or lexical feature of another slot's
//! filler, `$name` reads a clause variable (or the alternation variable),
//! anything else is a literal.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::lang::{Category, Language};
use crate::lexicon::Constraints;
use crate::morphology::{Case, ConcordSlotKind, Paradigm};

pub const TEMPLATE_SCHEMA_VERSION: u32 = 1;

#[derive(Debug, thiserror::Error)]
pub enum TemplateError {
    #[error("cannot read {path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed template {path}: {source}")]
    Parse { path: PathBuf, source: serde_json::Error },
    #[error("template `{suite}` is invalid: {}", .problems.join("; "))]
    Invalid { suite: String, problems: Vec<String> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Template {
    pub schema_version: u32,
    pub suite_name: String,
    pub language: Language,
    pub phenomenon: String,
    /// False for suites kept out of default runs and reports.
    #[serde(default = "yes")]
    pub validated: bool,
    /// Clause-level variables, each sampled uniformly per pair.
    #[serde(default)]
    pub clause: BTreeMap<String, Vec<String>>,
    pub slots: Vec<Slot>,
    #[serde(default)]
    pub cross_constraints: Vec<CrossConstraint>,
    pub target: TargetRule,
}

fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Slot {
    pub role: String,
    /// Lexical category of the filler; absent for slots realized without a
    /// lexical entry (auxiliaries, concord words, literals).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub category: Option<Category>,
    #[serde(default)]
    pub constraints: BTreeMap<String, Vec<String>>,
    /// Inflectional features sampled for the filler.
    #[serde(default)]
    pub sample: BTreeMap<String, Vec<String>>,
    pub realize: Realize,
}

impl Slot {
    pub fn lexical_constraints(&self) -> Constraints {
        self.constraints
            .iter()
            .map(|(k, vs)| (k.clone(), vs.iter().cloned().collect()))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Realize {
    Lemma,
    Literal {
        text: String,
    },
    /// Listed form or rule-based inflection for a bundle of expressions.
    Inflect {
        bundle: BTreeMap<String, String>,
    },
    BasqueCase {
        case: Case,
    },
    /// Roles name the slots whose `number` the auxiliary agrees with.
    BasqueAux {
        paradigm: Paradigm,
        subject: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        direct_object: Option<String>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        indirect_object: Option<String>,
        #[serde(default = "tense_var")]
        tense: String,
    },
    /// Concord word (or prefix + the filler's stem when the slot is lexical)
    /// agreeing with the `controller` role.
    SwahiliConcord {
        concord: ConcordSlotKind,
        controller: String,
    },
    SwahiliVerb {
        controller: String,
        #[serde(default)]
        relative: bool,
    },
}

fn tense_var() -> String {
    "$tense".into()
}

impl Realize {
    /// Roles this realization reads from.
    pub fn roles(&self) -> Vec<&str> {
        let mut out = Vec::new();
        match self {
            Realize::Inflect { bundle } => {
                out.extend(bundle.values().filter_map(|v| Expr::parse(v).role()));
            }
            Realize::BasqueAux {
                subject,
                direct_object,
                indirect_object,
                ..
            } => {
                out.push(subject.as_str());
                out.extend(direct_object.as_deref());
                out.extend(indirect_object.as_deref());
            }
            Realize::SwahiliConcord { controller, .. } | Realize::SwahiliVerb { controller, .. } => {
                out.push(controller.as_str())
            }
            Realize::Lemma | Realize::Literal { .. } | Realize::BasqueCase { .. } => {}
        }
        out
    }

    /// Variables (`$name`) this realization reads.
    pub fn variables(&self) -> Vec<&str> {
        match self {
            Realize::Inflect { bundle } => bundle.values().filter_map(|v| Expr::parse(v).variable()).collect(),
            Realize::BasqueAux { tense, .. } => Expr::parse(tense).variable().into_iter().collect(),
            _ => Vec::new(),
        }
    }
}

/// A parsed value expression.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Expr<'a> {
    Feature { role: &'a str, feature: &'a str },
    Variable(&'a str),
    Literal(&'a str),
}

impl<'a> Expr<'a> {
    pub fn parse(s: &'a str) -> Expr<'a> {
        if let Some(rest) = s.strip_prefix('@') {
            if let Some((role, feature)) = rest.split_once('.') {
                return Expr::Feature { role, feature };
            }
        }
        if let Some(name) = s.strip_prefix('$') {
            return Expr::Variable(name);
        }
        Expr::Literal(s)
    }

    fn role(self) -> Option<&'a str> {
        match self {
            Expr::Feature { role, .. } => Some(role),
            _ => None,
        }
    }

    fn variable(self) -> Option<&'a str> {
        match self {
            Expr::Variable(v) => Some(v),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum CrossConstraint {
    /// `feature` of `focus` differs from that of every role in `others`.
    Differ {
        feature: String,
        focus: String,
        others: Vec<String>,
    },
    /// The head's `head_feature` ("any" or `a|b|c`) admits the dependent's
    /// `dependent_feature`.
    Selects {
        head: String,
        head_feature: String,
        dependent: String,
        dependent_feature: String,
    },
    /// The listed roles are filled by pairwise distinct lemmas.
    Distinct { roles: Vec<String> },
}

impl fmt::Display for CrossConstraint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CrossConstraint::Differ { feature, focus, others } => {
                write!(f, "{feature}({focus}) differs from {feature}({})", others.join(", "))
            }
            CrossConstraint::Selects {
                head,
                head_feature,
                dependent,
                dependent_feature,
            } => write!(f, "{head}.{head_feature} admits {dependent}.{dependent_feature}"),
            CrossConstraint::Distinct { roles } => write!(f, "distinct lemmas for {}", roles.join(", ")),
        }
    }
}

/// Value sets like `human|animal`; `any` admits everything.
pub fn admits(set: &str, value: &str) -> bool {
    set == "any" || set.split('|').any(|v| v == value)
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetRule {
    pub slot: String,
    pub alternation: Alternation,
}

/// How the ungrammatical target is obtained from the grammatical one.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum Alternation {
    /// `$name` takes `grammatical` or `ungrammatical` in the target slot.
    Variable {
        name: String,
        grammatical: String,
        ungrammatical: String,
    },
    /// The target agrees with the flipped number of `argument`.
    FlipNumber { argument: String },
    /// The target agrees with `to` instead of its controller `from`.
    Controller { from: String, to: String },
}

impl Alternation {
    pub fn describe(&self) -> String {
        match self {
            Alternation::Variable {
                name,
                grammatical,
                ungrammatical,
            } => format!("{name}:{grammatical}>{ungrammatical}"),
            Alternation::FlipNumber { argument } => format!("number:{argument}"),
            Alternation::Controller { from, to } => format!("controller:{from}>{to}"),
        }
    }
}

impl Template {
    pub fn from_json_str(text: &str, path: &Path) -> Result<Self, TemplateError> {
        let t: Template = serde_json::from_str(text).map_err(|source| TemplateError::Parse {
            path: path.to_path_buf(),
            source,
        })?;
        t.validate()?;
        Ok(t)
    }

    pub fn slot(&self, role: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.role == role)
    }

    pub fn target_index(&self) -> usize {
        self.slots
            .iter()
            .position(|s| s.role == self.target.slot)
            .expect("validated template has its target slot")
    }

    /// Structural checks that do not need a lexicon.
    pub fn validate(&self) -> Result<(), TemplateError> {
        let mut problems = Vec::new();
        if self.schema_version != TEMPLATE_SCHEMA_VERSION {
            problems.push(format!("unsupported schema version {}", self.schema_version));
        }
        match Language::from_suite_name(&self.suite_name) {
            Some(l) if l == self.language => {}
            _ => problems.push(format!("suite name does not start with `{}-`", self.language)),
        }
        let mut roles = BTreeSet::new();
        for s in &self.slots {
            if !roles.insert(s.role.as_str()) {
                problems.push(format!("role `{}` appears twice", s.role));
            }
        }
        let lexical: BTreeSet<&str> = self
            .slots
            .iter()
            .filter(|s| s.category.is_some())
            .map(|s| s.role.as_str())
            .collect();
        let known_role = |r: &str| roles.contains(r);

        let alt_var = match &self.target.alternation {
            Alternation::Variable { name, .. } => Some(name.as_str()),
            _ => None,
        };
        for s in &self.slots {
            if s.category.is_none() && (!s.constraints.is_empty() || !s.sample.is_empty()) {
                problems.push(format!("slot `{}` has constraints but no category", s.role));
            }
            let needs_entry = matches!(
                s.realize,
                Realize::Lemma | Realize::Inflect { .. } | Realize::BasqueCase { .. } | Realize::SwahiliVerb { .. }
            );
            if needs_entry && s.category.is_none() {
                problems.push(format!("slot `{}` needs a lexical category", s.role));
            }
            for r in s.realize.roles() {
                if !lexical.contains(r) {
                    problems.push(format!("slot `{}` refers to unknown or non-lexical role `{r}`", s.role));
                }
            }
            for v in s.realize.variables() {
                if !self.clause.contains_key(v) && Some(v) != alt_var {
                    problems.push(format!("slot `{}` reads undefined variable `${v}`", s.role));
                }
            }
            let language_ok = match s.realize {
                Realize::BasqueCase { .. } | Realize::BasqueAux { .. } => self.language == Language::Basque,
                Realize::SwahiliConcord { .. } | Realize::SwahiliVerb { .. } => self.language == Language::Swahili,
                _ => true,
            };
            if !language_ok {
                problems.push(format!("slot `{}` uses a rule for another language", s.role));
            }
            if let Realize::BasqueAux {
                paradigm,
                direct_object,
                indirect_object,
                ..
            } = &s.realize
            {
                if direct_object.is_some() != paradigm.has_direct_object()
                    || indirect_object.is_some() != paradigm.has_indirect_object()
                {
                    problems.push(format!(
                        "slot `{}`: arguments do not match paradigm {paradigm:?}",
                        s.role
                    ));
                }
            }
        }
        for c in &self.cross_constraints {
            let named: Vec<&str> = match c {
                CrossConstraint::Differ { focus, others, .. } => std::iter::once(focus.as_str())
                    .chain(others.iter().map(String::as_str))
                    .collect(),
                CrossConstraint::Selects { head, dependent, .. } => vec![head, dependent],
                CrossConstraint::Distinct { roles } => roles.iter().map(String::as_str).collect(),
            };
            for r in named {
                if !lexical.contains(r) {
                    problems.push(format!("constraint `{c}` names unknown or non-lexical role `{r}`"));
                }
            }
        }

        match self.slot(&self.target.slot) {
            None => problems.push(format!("target slot `{}` does not exist", self.target.slot)),
            Some(target) => {
                let reads = target.realize.roles();
                let ok = match &self.target.alternation {
                    Alternation::Variable { name, .. } => {
                        !self.clause.contains_key(name) && target.realize.variables().contains(&name.as_str())
                    }
                    Alternation::FlipNumber { argument } => {
                        matches!(target.realize, Realize::BasqueAux { .. }) && reads.contains(&argument.as_str())
                    }
                    Alternation::Controller { from, to } => reads.contains(&from.as_str()) && known_role(to),
                };
                if !ok {
                    problems.push(format!(
                        "alternation `{}` does not act on target slot `{}`",
                        self.target.alternation.describe(),
                        target.role
                    ));
                }
            }
        }
        for (name, values) in &self.clause {
            if values.is_empty() {
                problems.push(format!("clause variable `{name}` has no values"));
            }
        }
        for s in &self.slots {
            for (name, values) in &s.sample {
                if values.is_empty() {
                    problems.push(format!("slot `{}` samples `{name}` from no values", s.role));
                }
            }
        }

        if problems.is_empty() {
            Ok(())
        } else {
            Err(TemplateError::Invalid {
                suite: self.suite_name.clone(),
                problems,
            })
        }
    }
}

pub fn load_template(path: impl AsRef<Path>) -> Result<Template, TemplateError> {
    let path = path.as_ref();
    let text = std::fs::read_to_string(path).map_err(|source| TemplateError::Io {
        path: path.to_path_buf(),
        source,
    })?;
    Template::from_json_str(&text, path)
}

/// Every `*.template.json` in `dir`, sorted by suite name.
pub fn load_templates(dir: impl AsRef<Path>) -> Result<Vec<Template>, TemplateError> {
    let dir = dir.as_ref();
    let read_err = |source| TemplateError::Io {
        path: dir.to_path_buf(),
        source,
    };
    let mut paths = Vec::new();
    for entry in std::fs::read_dir(dir).map_err(read_err)? {
        let path = entry.map_err(read_err)?.path();
        let is_template = path
            .file_name()
            .and_then(|n| n.to_str())
            .is_some_and(|n| n.ends_with(crate::resources::TEMPLATE_SUFFIX));
        if is_template {
            paths.push(path);
        }
    }
    let mut templates = paths.iter().map(load_template).collect::<Result<Vec<_>, _>>()?;
    templates.sort_by(|a, b| a.suite_name.cmp(&b.suite_name));
    if let Some(w) = templates.windows(2).find(|w| w[0].suite_name == w[1].suite_name) {
        return Err(TemplateError::Invalid {
            suite: w[0].suite_name.clone(),
            problems: vec!["defined by more than one file".into()],
        });
    }
    Ok(templates)
}
