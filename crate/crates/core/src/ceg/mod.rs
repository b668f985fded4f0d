//! Test-case derivation from conditional requirement sentences.
//!
//! A detector decides whether a sentence is causal and splits it into causes
//! and effects. The causes are wired into a cause-effect graph and a
//! modified condition/decision suite is read off its truth table.

mod derive;
mod extract;
mod graph;

use std::fmt;
use std::str::FromStr;

pub use derive::{derive_tests, emit_test_skeletons, DerivedTestCase};
pub use extract::{CauseTree, RuleBasedDetector};
pub use graph::{build_graph, CauseEffectGraph, Gate, GateKind, NodeId};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RequirementKind {
    Functional,
    ArchitecturalQuality,
    Interface,
}

impl RequirementKind {
    pub fn as_str(self) -> &'static str {
        match self {
            RequirementKind::Functional => "functional",
            RequirementKind::ArchitecturalQuality => "architectural-quality",
            RequirementKind::Interface => "interface",
        }
    }
}

impl fmt::Display for RequirementKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for RequirementKind {
    type Err = CegError;

    fn from_str(s: &str) -> Result<Self, CegError> {
        match s {
            "functional" => Ok(RequirementKind::Functional),
            "architectural-quality" => Ok(RequirementKind::ArchitecturalQuality),
            "interface" => Ok(RequirementKind::Interface),
            other => Err(CegError::UnknownKind(other.to_string())),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Requirement {
    pub id: String,
    pub kind: RequirementKind,
    pub text: String,
}

impl Requirement {
    pub fn new(id: impl Into<String>, kind: RequirementKind, text: impl Into<String>) -> Self {
        Requirement {
            id: id.into(),
            kind,
            text: text.into(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Causality {
    Causal,
    NonCausal,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Cause {
    pub phrase: String,
    pub negated: bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Effect {
    pub phrase: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Combinator {
    Single,
    And,
    Or,
    /// Both connectives; `and` binds tighter than `or`.
    Mixed,
}

/// The fine-grained reading of one causal sentence.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Conditional {
    pub causes: Vec<Cause>,
    pub combinator: Combinator,
    /// How the causes combine. Leaves index into `causes`.
    pub tree: CauseTree,
    pub effects: Vec<Effect>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CegError {
    #[error("no conditional found in \"{0}\"")]
    NotCausal(String),
    #[error("conditional without an extractable consequent in \"{0}\"")]
    NoConsequent(String),
    #[error("conditional without an extractable antecedent in \"{0}\"")]
    NoAntecedent(String),
    #[error("unknown requirement kind `{0}`")]
    UnknownKind(String),
    #[error("line {line}: {message}")]
    Record { line: usize, message: String },
    #[error("duplicate requirement id `{0}`")]
    DuplicateId(String),
}

/// Pluggable sentence analysis. The bundled implementation is
/// [`RuleBasedDetector`]; a remote classifier can stand in for it.
pub trait ConditionalDetector {
    fn classify(&self, text: &str) -> Causality {
        if self.extract(text).is_ok() {
            Causality::Causal
        } else {
            Causality::NonCausal
        }
    }

    fn extract(&self, text: &str) -> Result<Conditional, CegError>;
}

pub fn classify(req: &Requirement) -> Causality {
    RuleBasedDetector.classify(&req.text)
}

pub fn extract(req: &Requirement) -> Result<Conditional, CegError> {
    RuleBasedDetector.extract(&req.text)
}

/// Parses `<id> TAB <kind> TAB <text>` records. Blank lines are skipped.
pub fn parse_requirements(text: &str) -> Result<Vec<Requirement>, CegError> {
    let mut out: Vec<Requirement> = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        if line.trim().is_empty() {
            continue;
        }
        let record = |message: &str| CegError::Record {
            line: line_no,
            message: message.to_string(),
        };
        let mut fields = line.splitn(3, '\t');
        let (Some(id), Some(kind), Some(sentence)) = (fields.next(), fields.next(), fields.next()) else {
            return Err(record("expected `<id>\\t<kind>\\t<text>`"));
        };
        let id = id.trim();
        if id.is_empty() || id.contains(char::is_whitespace) {
            return Err(record("requirement id must be a non-empty word"));
        }
        let kind = kind.trim().parse().map_err(|e: CegError| record(&e.to_string()))?;
        let sentence = sentence.trim();
        if sentence.is_empty() {
            return Err(record("requirement text is empty"));
        }
        if out.iter().any(|r| r.id == id) {
            return Err(CegError::DuplicateId(id.to_string()));
        }
        out.push(Requirement::new(id, kind, sentence));
    }
    Ok(out)
}

/// Inverse of [`parse_requirements`].
pub fn write_requirements(reqs: &[Requirement]) -> String {
    reqs.iter()
        .map(|r| format!("{}\t{}\t{}\n", r.id, r.kind, r.text))
        .collect()
}
