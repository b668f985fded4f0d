use std::collections::BTreeMap;
use std::fmt;

use crate::value::{Timestamp, Value};

/// Name → value map accumulated from matched free slots.
pub type Bindings = BTreeMap<String, Value>;

/// A possibly nested object such as `obc.comStack`.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct ObjectRef {
    owner_path: Vec<String>,
    name: String,
}

impl ObjectRef {
    /// Builds a reference from its dotted path. Returns `None` if any segment
    /// is empty.
    pub fn parse(path: &str) -> Option<ObjectRef> {
        let mut segments: Vec<String> = path.split('.').map(str::to_string).collect();
        if segments.iter().any(|s| s.is_empty()) {
            return None;
        }
        let name = segments.pop()?;
        Some(ObjectRef {
            owner_path: segments,
            name,
        })
    }

    /// Panicking variant of [`ObjectRef::parse`] for literal paths.
    pub fn new(path: &str) -> ObjectRef {
        ObjectRef::parse(path).unwrap_or_else(|| panic!("invalid object path {path:?}"))
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn owner_path(&self) -> &[String] {
        &self.owner_path
    }

    pub fn qualified(&self) -> String {
        self.to_string()
    }
}

impl fmt::Display for ObjectRef {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for owner in &self.owner_path {
            write!(f, "{owner}.")?;
        }
        f.write_str(&self.name)
    }
}

/// A concrete message between two objects.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Event {
    pub sender: ObjectRef,
    pub receiver: ObjectRef,
    pub label: String,
    pub parameters: Vec<Value>,
}

impl Event {
    pub fn new(sender: &str, receiver: &str, label: &str, parameters: Vec<Value>) -> Event {
        Event {
            sender: ObjectRef::new(sender),
            receiver: ObjectRef::new(receiver),
            label: label.to_string(),
            parameters,
        }
    }

    /// `<sender> -> <receiver> . <label>(<values>)` with timestamps relative
    /// to `now`.
    pub fn render(&self, now: Timestamp) -> String {
        format!(
            "{} -> {} . {}({})",
            self.sender,
            self.receiver,
            self.label,
            render_parameters(&self.parameters, now)
        )
    }
}

pub fn render_parameters(parameters: &[Value], now: Timestamp) -> String {
    parameters
        .iter()
        .map(|v| v.render_relative(now))
        .collect::<Vec<_>>()
        .join(", ")
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum SenderPattern {
    Any,
    Exactly(ObjectRef),
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Slot {
    Bound(Value),
    Free(String),
}

/// A symbolic event: matches concrete events and binds free slots.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct EventPattern {
    pub sender: SenderPattern,
    pub receiver: ObjectRef,
    pub label: String,
    pub slots: Vec<Slot>,
}

impl EventPattern {
    /// Pattern with one free slot per name.
    pub fn symbolic(sender: Option<&str>, receiver: &str, label: &str, free: &[&str]) -> Self {
        EventPattern {
            sender: sender.map_or(SenderPattern::Any, |s| SenderPattern::Exactly(ObjectRef::new(s))),
            receiver: ObjectRef::new(receiver),
            label: label.to_string(),
            slots: free.iter().map(|n| Slot::Free(n.to_string())).collect(),
        }
    }

    /// Pattern that matches exactly `event`.
    pub fn exact(event: &Event) -> Self {
        EventPattern {
            sender: SenderPattern::Exactly(event.sender.clone()),
            receiver: event.receiver.clone(),
            label: event.label.clone(),
            slots: event.parameters.iter().cloned().map(Slot::Bound).collect(),
        }
    }

    pub fn free_names(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().filter_map(|s| match s {
            Slot::Free(n) => Some(n.as_str()),
            Slot::Bound(_) => None,
        })
    }

    /// True if no free name occurs twice.
    pub fn is_well_formed(&self) -> bool {
        let mut seen = std::collections::BTreeSet::new();
        self.free_names().all(|n| seen.insert(n))
    }

    pub fn objects(&self) -> impl Iterator<Item = &ObjectRef> {
        let sender = match &self.sender {
            SenderPattern::Exactly(o) => Some(o),
            SenderPattern::Any => None,
        };
        sender.into_iter().chain(std::iter::once(&self.receiver))
    }
}

impl fmt::Display for EventPattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match &self.sender {
            SenderPattern::Any => f.write_str("*")?,
            SenderPattern::Exactly(o) => write!(f, "{o}")?,
        }
        write!(f, " -> {} . {}(", self.receiver, self.label)?;
        for (i, slot) in self.slots.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            match slot {
                Slot::Bound(v) => write!(f, "{v}")?,
                Slot::Free(n) => write!(f, "?{n}")?,
            }
        }
        f.write_str(")")
    }
}

/// Matches `pattern` against `event`, returning the bindings of its free
/// slots. Arity mismatch is a plain no-match.
pub fn match_event(pattern: &EventPattern, event: &Event) -> Option<Bindings> {
    if pattern.receiver != event.receiver
        || pattern.label != event.label
        || pattern.slots.len() != event.parameters.len()
    {
        return None;
    }
    if let SenderPattern::Exactly(sender) = &pattern.sender {
        if *sender != event.sender {
            return None;
        }
    }
    let mut bindings = Bindings::new();
    for (slot, value) in pattern.slots.iter().zip(&event.parameters) {
        match slot {
            Slot::Bound(expected) if expected != value => return None,
            Slot::Bound(_) => {}
            Slot::Free(name) => match bindings.get(name) {
                Some(prior) if prior != value => return None,
                Some(_) => {}
                None => {
                    bindings.insert(name.clone(), value.clone());
                }
            },
        }
    }
    Some(bindings)
}

/// Like [`match_event`], but free names already present in `existing` act as
/// bound slots, so a binding never changes once made.
pub fn match_with(pattern: &EventPattern, event: &Event, existing: &Bindings) -> Option<Bindings> {
    let fresh = match_event(pattern, event)?;
    for (name, value) in &fresh {
        if let Some(prior) = existing.get(name) {
            if prior != value {
                return None;
            }
        }
    }
    Some(fresh)
}
