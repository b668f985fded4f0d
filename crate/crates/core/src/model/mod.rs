//! The traceability model: typed elements, typed links between them, views
//! derived from both, and consistency checks.
//!
//! The model is persisted as one JSON document with `elements` and `links`
//! arrays. Saving a loaded model reproduces the file byte for byte.

mod checks;
mod ontology;
mod results;
mod views;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};

use crate::value::Value;

pub use checks::{check_consistency, Finding, Severity};
pub use ontology::{admissible, ElementKind, Relation, ADJACENCY};
pub use results::{goal_is_green, latest_result, record_test_results};
pub use views::{derive_view, Role, Row, ViewKind, ViewResult};

/// Attribute holding a requirement's causal classification.
pub const CAUSAL: &str = "causal";

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ModelElement {
    pub id: String,
    pub kind: ElementKind,
    pub name: String,
    #[serde(default)]
    pub attributes: BTreeMap<String, Value>,
}

impl ModelElement {
    pub fn new(id: impl Into<String>, kind: ElementKind, name: impl Into<String>) -> Self {
        ModelElement {
            id: id.into(),
            kind,
            name: name.into(),
            attributes: BTreeMap::new(),
        }
    }

    pub fn with_attribute(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.attributes.insert(key.to_string(), value.into());
        self
    }

    pub fn attribute(&self, key: &str) -> Option<&Value> {
        self.attributes.get(key)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct TraceLink {
    pub source: String,
    pub relation: Relation,
    pub target: String,
}

impl TraceLink {
    pub fn new(source: impl Into<String>, relation: Relation, target: impl Into<String>) -> Self {
        TraceLink {
            source: source.into(),
            relation,
            target: target.into(),
        }
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ModelError {
    #[error("duplicate element id `{0}`")]
    DuplicateId(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("`{source_kind} {relation} {target_kind}` is not an admissible link ({from} -> {target})")]
    Inadmissible {
        from: String,
        source_kind: ElementKind,
        relation: Relation,
        target: String,
        target_kind: ElementKind,
    },
    #[error("link `{from} {relation} {target}` already exists")]
    DuplicateLink {
        from: String,
        relation: Relation,
        target: String,
    },
    #[error("`{id}` is a {actual}, expected a {expected}")]
    WrongKind {
        id: String,
        actual: ElementKind,
        expected: ElementKind,
    },
    #[error("malformed model file: {0}")]
    Json(#[from] serde_json::Error),
}

#[derive(Serialize, Deserialize)]
struct ModelFile {
    elements: Vec<ModelElement>,
    links: Vec<TraceLink>,
}

/// Elements keep insertion order, which is also the order views list them in.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SystemModel {
    elements: Vec<ModelElement>,
    links: Vec<TraceLink>,
    index: HashMap<String, usize>,
}

impl SystemModel {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn elements(&self) -> &[ModelElement] {
        &self.elements
    }

    pub fn links(&self) -> &[TraceLink] {
        &self.links
    }

    pub fn element(&self, id: &str) -> Option<&ModelElement> {
        self.index.get(id).map(|&i| &self.elements[i])
    }

    pub fn contains(&self, id: &str) -> bool {
        self.index.contains_key(id)
    }

    pub fn kind_of(&self, id: &str) -> Option<ElementKind> {
        self.element(id).map(|e| e.kind)
    }

    pub fn elements_of(&self, kind: ElementKind) -> impl Iterator<Item = &ModelElement> {
        self.elements.iter().filter(move |e| e.kind == kind)
    }

    pub fn add_element(&mut self, element: ModelElement) -> Result<(), ModelError> {
        if self.index.contains_key(&element.id) {
            return Err(ModelError::DuplicateId(element.id));
        }
        self.index.insert(element.id.clone(), self.elements.len());
        self.elements.push(element);
        Ok(())
    }

    /// Sets an attribute on an existing element. The kind never changes.
    pub fn set_attribute(&mut self, id: &str, key: &str, value: impl Into<Value>) -> Result<(), ModelError> {
        let &i = self
            .index
            .get(id)
            .ok_or_else(|| ModelError::UnknownElement(id.to_string()))?;
        self.elements[i].attributes.insert(key.to_string(), value.into());
        Ok(())
    }

    pub fn add_link(&mut self, link: TraceLink) -> Result<(), ModelError> {
        let source_kind = self
            .kind_of(&link.source)
            .ok_or_else(|| ModelError::UnknownElement(link.source.clone()))?;
        let target_kind = self
            .kind_of(&link.target)
            .ok_or_else(|| ModelError::UnknownElement(link.target.clone()))?;
        if !admissible(source_kind, link.relation, target_kind) {
            return Err(ModelError::Inadmissible {
                from: link.source,
                source_kind,
                relation: link.relation,
                target: link.target,
                target_kind,
            });
        }
        if self.links.contains(&link) {
            return Err(ModelError::DuplicateLink {
                from: link.source,
                relation: link.relation,
                target: link.target,
            });
        }
        self.links.push(link);
        Ok(())
    }

    pub fn link(&mut self, source: &str, relation: Relation, target: &str) -> Result<(), ModelError> {
        self.add_link(TraceLink::new(source, relation, target))
    }

    /// Removes a link; returns whether it was present.
    pub fn remove_link(&mut self, link: &TraceLink) -> bool {
        let before = self.links.len();
        self.links.retain(|l| l != link);
        self.links.len() != before
    }

    /// Targets of `relation` links leaving `source`, in link order.
    pub fn targets<'a>(&'a self, source: &'a str, relation: Relation) -> impl Iterator<Item = &'a str> + 'a {
        self.links
            .iter()
            .filter(move |l| l.source == source && l.relation == relation)
            .map(|l| l.target.as_str())
    }

    /// Sources of `relation` links entering `target`, in link order.
    pub fn sources<'a>(&'a self, target: &'a str, relation: Relation) -> impl Iterator<Item = &'a str> + 'a {
        self.links
            .iter()
            .filter(move |l| l.target == target && l.relation == relation)
            .map(|l| l.source.as_str())
    }

    /// [`Self::targets`] restricted to elements of `kind`.
    pub fn targets_of<'a>(
        &'a self,
        source: &'a str,
        relation: Relation,
        kind: ElementKind,
    ) -> impl Iterator<Item = &'a str> + 'a {
        self.targets(source, relation)
            .filter(move |t| self.kind_of(t) == Some(kind))
    }

    /// [`Self::sources`] restricted to elements of `kind`.
    pub fn sources_of<'a>(
        &'a self,
        target: &'a str,
        relation: Relation,
        kind: ElementKind,
    ) -> impl Iterator<Item = &'a str> + 'a {
        self.sources(target, relation)
            .filter(move |s| self.kind_of(s) == Some(kind))
    }

    pub(crate) fn require_kind(&self, id: &str, expected: ElementKind) -> Result<&ModelElement, ModelError> {
        let element = self
            .element(id)
            .ok_or_else(|| ModelError::UnknownElement(id.to_string()))?;
        if element.kind != expected {
            return Err(ModelError::WrongKind {
                id: id.to_string(),
                actual: element.kind,
                expected,
            });
        }
        Ok(element)
    }

    /// Pretty-printed JSON, newline-terminated.
    pub fn to_json(&self) -> String {
        let file = ModelFile {
            elements: self.elements.clone(),
            links: self.links.clone(),
        };
        let mut text = serde_json::to_string_pretty(&file).expect("model values always serialize");
        text.push('\n');
        text
    }

    /// Parses and re-validates a model file; invalid content is rejected as a
    /// whole.
    pub fn from_json(text: &str) -> Result<SystemModel, ModelError> {
        let file: ModelFile = serde_json::from_str(text)?;
        let mut model = SystemModel::new();
        for element in file.elements {
            model.add_element(element)?;
        }
        for link in file.links {
            model.add_link(link)?;
        }
        Ok(model)
    }
}
