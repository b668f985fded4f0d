use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use super::event::{Bindings, Event, EventPattern, ObjectRef};
use crate::value::Timestamp;

/// What a scenario declares while paused: events it requests, patterns it
/// waits for and patterns it forbids.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SyncPoint {
    pub requested: Vec<Event>,
    pub waited: Vec<EventPattern>,
    pub forbidden: Vec<EventPattern>,
}

impl SyncPoint {
    pub fn request(event: Event) -> Self {
        SyncPoint {
            requested: vec![event],
            ..SyncPoint::default()
        }
    }

    pub fn wait(pattern: EventPattern) -> Self {
        SyncPoint {
            waited: vec![pattern],
            ..SyncPoint::default()
        }
    }

    pub fn with_forbidden(mut self, pattern: EventPattern) -> Self {
        self.forbidden.push(pattern);
        self
    }

    pub fn is_empty(&self) -> bool {
        self.requested.is_empty() && self.waited.is_empty() && self.forbidden.is_empty()
    }

    pub(crate) fn objects(&self) -> impl Iterator<Item = &ObjectRef> {
        self.requested
            .iter()
            .flat_map(|e| [&e.sender, &e.receiver])
            .chain(self.waited.iter().flat_map(EventPattern::objects))
            .chain(self.forbidden.iter().flat_map(EventPattern::objects))
    }
}

/// Raised by a scenario body to end the run with a red verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AssertionFailure {
    pub message: String,
}

impl AssertionFailure {
    pub fn new(message: impl Into<String>) -> Self {
        AssertionFailure {
            message: message.into(),
        }
    }
}

/// Read-only view handed to a running body each time it resumes.
pub struct ResumeContext<'a> {
    pub bindings: &'a Bindings,
    /// The event that released the previous sync point, or the trigger event
    /// on the first resume of a triggered activation. `None` on start-up.
    pub event: Option<&'a Event>,
    pub now: Timestamp,
}

/// One activation of a scenario body.
pub trait ScenarioRun: Send {
    /// Runs the body up to its next sync point. `Ok(None)` means the body
    /// completed normally.
    fn resume(&mut self, ctx: &ResumeContext<'_>) -> Result<Option<SyncPoint>, AssertionFailure>;
}

/// A scenario body definition; each activation gets a fresh run.
pub trait ScenarioScript: Send + Sync + fmt::Debug {
    fn start(&self) -> Box<dyn ScenarioRun>;

    /// Objects the body may reference, when statically known.
    fn declared_objects(&self) -> Vec<ObjectRef> {
        Vec::new()
    }
}

/// A body that walks a fixed list of sync points.
#[derive(Clone, Debug, Default)]
pub struct FixedScript {
    pub sync_points: Vec<SyncPoint>,
}

impl FixedScript {
    pub fn new(sync_points: Vec<SyncPoint>) -> Self {
        FixedScript { sync_points }
    }
}

struct FixedRun {
    sync_points: Arc<[SyncPoint]>,
    next: usize,
}

impl ScenarioRun for FixedRun {
    fn resume(&mut self, _ctx: &ResumeContext<'_>) -> Result<Option<SyncPoint>, AssertionFailure> {
        let sp = self.sync_points.get(self.next).cloned();
        self.next += 1;
        Ok(sp)
    }
}

impl ScenarioScript for FixedScript {
    fn start(&self) -> Box<dyn ScenarioRun> {
        Box::new(FixedRun {
            sync_points: self.sync_points.clone().into(),
            next: 0,
        })
    }

    fn declared_objects(&self) -> Vec<ObjectRef> {
        let set: BTreeSet<&ObjectRef> = self.sync_points.iter().flat_map(SyncPoint::objects).collect();
        set.into_iter().cloned().collect()
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub id: String,
    /// `None` means the scenario is active from the start.
    pub trigger: Option<EventPattern>,
    pub script: Arc<dyn ScenarioScript>,
}

impl Scenario {
    pub fn new(id: impl Into<String>, trigger: Option<EventPattern>, script: impl ScenarioScript + 'static) -> Self {
        Scenario {
            id: id.into(),
            trigger,
            script: Arc::new(script),
        }
    }
}

/// Scenarios executed jointly. Registration order is the order of
/// `scenarios` and drives event-selection tie-breaking.
#[derive(Clone, Debug)]
pub struct ScenarioProgram {
    pub id: String,
    pub scenarios: Vec<Scenario>,
    pub objects: BTreeSet<ObjectRef>,
}

impl ScenarioProgram {
    pub fn new(id: impl Into<String>) -> Self {
        ScenarioProgram {
            id: id.into(),
            scenarios: Vec::new(),
            objects: BTreeSet::new(),
        }
    }

    /// Adds a scenario and every object its trigger and script statically name.
    pub fn with_scenario(mut self, scenario: Scenario) -> Self {
        if let Some(trigger) = &scenario.trigger {
            self.objects.extend(trigger.objects().cloned());
        }
        self.objects.extend(scenario.script.declared_objects());
        self.scenarios.push(scenario);
        self
    }

    pub fn with_objects<'a>(mut self, paths: impl IntoIterator<Item = &'a str>) -> Self {
        self.objects.extend(paths.into_iter().map(ObjectRef::new));
        self
    }
}
