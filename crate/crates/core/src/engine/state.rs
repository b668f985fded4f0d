use std::collections::{BTreeSet, HashSet};
use std::sync::Arc;

use super::event::{match_event, match_with, Bindings, Event, EventPattern, ObjectRef};
use super::scenario::{ResumeContext, ScenarioProgram, ScenarioRun, ScenarioScript, SyncPoint};
use super::trace::{ExecutionTrace, Terminal, TraceStep};
use super::EngineError;
use crate::value::Timestamp;

pub const DEFAULT_STEP_BUDGET: usize = 10_000;

/// Externally visible lifecycle of one scenario.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ScenarioStatus {
    /// Triggered scenario waiting for its trigger.
    Dormant,
    /// Paused at its `sync_index`-th sync point of the current activation.
    Active { sync_index: usize },
    /// Untriggered scenario whose body completed.
    Finished,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum StepOutcome {
    Selected {
        index: usize,
        event: Event,
        advanced: Vec<String>,
    },
    Quiescent,
    /// An advanced scenario raised an assertion failure; the run is over.
    Failed {
        index: usize,
        event: Event,
        advanced: Vec<String>,
        scenario: String,
        message: String,
    },
}

struct Active {
    run: Box<dyn ScenarioRun>,
    sync: SyncPoint,
    sync_index: usize,
    bindings: Bindings,
}

enum Status {
    Dormant,
    Active(Active),
    Finished,
}

struct Slot {
    program: usize,
    id: String,
    trigger: Option<EventPattern>,
    script: Arc<dyn ScenarioScript>,
    status: Status,
}

enum Resumed {
    Paused,
    Completed,
    Failed(String),
}

/// Jointly activated scenario programs sharing one event space.
pub struct EngineState {
    program_ids: Vec<String>,
    program_objects: Vec<BTreeSet<ObjectRef>>,
    slots: Vec<Slot>,
    now: Timestamp,
    history: Vec<TraceStep>,
    failure: Option<(String, String)>,
    broken: bool,
}

impl std::fmt::Debug for EngineState {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("EngineState")
            .field("programs", &self.program_ids)
            .field("scenarios", &self.slots.iter().map(|s| &s.id).collect::<Vec<_>>())
            .field("steps", &self.history.len())
            .finish()
    }
}

impl EngineState {
    /// Activates a single program.
    pub fn activate(program: &ScenarioProgram, now: Timestamp) -> Result<EngineState, EngineError> {
        Self::activate_all(std::slice::from_ref(program), now)
    }

    /// Activates several programs in one shared event space. Registration
    /// order is program order, then scenario order within each program.
    pub fn activate_all(programs: &[ScenarioProgram], now: Timestamp) -> Result<EngineState, EngineError> {
        let mut program_ids = HashSet::new();
        let mut scenario_ids = HashSet::new();
        let mut slots = Vec::new();
        for (index, program) in programs.iter().enumerate() {
            if !program_ids.insert(program.id.as_str()) {
                return Err(EngineError::DuplicateProgram(program.id.clone()));
            }
            for scenario in &program.scenarios {
                if !scenario_ids.insert(scenario.id.as_str()) {
                    return Err(EngineError::DuplicateScenario(scenario.id.clone()));
                }
                if let Some(trigger) = &scenario.trigger {
                    check_pattern(&scenario.id, trigger, &program.objects)?;
                }
                slots.push(Slot {
                    program: index,
                    id: scenario.id.clone(),
                    trigger: scenario.trigger.clone(),
                    script: scenario.script.clone(),
                    status: Status::Dormant,
                });
            }
        }

        let mut state = EngineState {
            program_ids: programs.iter().map(|p| p.id.clone()).collect(),
            program_objects: programs.iter().map(|p| p.objects.clone()).collect(),
            slots,
            now,
            history: Vec::new(),
            failure: None,
            broken: false,
        };

        for i in 0..state.slots.len() {
            if state.slots[i].trigger.is_some() {
                continue;
            }
            let run = state.slots[i].script.start();
            state.slots[i].status = Status::Active(Active {
                run,
                sync: SyncPoint::default(),
                sync_index: 0,
                bindings: Bindings::new(),
            });
            // sync_index counts released sync points; the first one is 0.
            if let Resumed::Failed(message) = state.resume_slot(i, None, true)? {
                state.failure = Some((state.slots[i].id.clone(), message));
                break;
            }
        }
        Ok(state)
    }

    pub fn now(&self) -> Timestamp {
        self.now
    }

    pub fn step_count(&self) -> usize {
        self.history.len()
    }

    pub fn is_terminal(&self) -> bool {
        self.failure.is_some() || self.broken
    }

    pub fn failure(&self) -> Option<(&str, &str)> {
        self.failure.as_ref().map(|(s, m)| (s.as_str(), m.as_str()))
    }

    pub fn history(&self) -> &[TraceStep] {
        &self.history
    }

    pub fn scenario_ids(&self) -> impl Iterator<Item = &str> {
        self.slots.iter().map(|s| s.id.as_str())
    }

    pub fn status(&self, scenario: &str) -> Option<ScenarioStatus> {
        self.slot(scenario).map(|s| match &s.status {
            Status::Dormant => ScenarioStatus::Dormant,
            Status::Active(a) => ScenarioStatus::Active {
                sync_index: a.sync_index,
            },
            Status::Finished => ScenarioStatus::Finished,
        })
    }

    pub fn sync_point(&self, scenario: &str) -> Option<&SyncPoint> {
        match &self.slot(scenario)?.status {
            Status::Active(a) => Some(&a.sync),
            _ => None,
        }
    }

    pub fn bindings(&self, scenario: &str) -> Option<&Bindings> {
        match &self.slot(scenario)?.status {
            Status::Active(a) => Some(&a.bindings),
            _ => None,
        }
    }

    /// Union of the requested sets of all active scenarios, in selection order.
    pub fn requested(&self) -> Vec<&Event> {
        self.active().flat_map(|(_, a)| a.sync.requested.iter()).collect()
    }

    /// Requested events matched by no active forbidden pattern, in selection
    /// priority order.
    pub fn selectable(&self) -> Vec<&Event> {
        self.requested().into_iter().filter(|e| !self.is_forbidden(e)).collect()
    }

    pub fn is_forbidden(&self, event: &Event) -> bool {
        self.active().any(|(_, a)| {
            a.sync
                .forbidden
                .iter()
                .any(|p| match_with(p, event, &a.bindings).is_some())
        })
    }

    /// True once every untriggered scenario of `program_id` has finished and
    /// none of its triggered scenarios is mid-activation.
    pub fn program_completed(&self, program_id: &str) -> bool {
        let Some(index) = self.program_ids.iter().position(|p| p == program_id) else {
            return false;
        };
        self.slots
            .iter()
            .filter(|s| s.program == index)
            .all(|s| match s.status {
                Status::Finished => true,
                Status::Dormant => s.trigger.is_some(),
                Status::Active(_) => false,
            })
    }

    /// Selects one event and advances every scenario that requested or
    /// waits for it. Quiescent leaves the state untouched.
    pub fn step(&mut self) -> Result<StepOutcome, EngineError> {
        if self.is_terminal() {
            return Err(EngineError::Terminated);
        }
        let Some(event) = self.selectable().first().map(|e| (*e).clone()) else {
            return Ok(StepOutcome::Quiescent);
        };
        let index = self.history.len();
        let mut advanced = Vec::new();
        let mut failed = None;

        for i in 0..self.slots.len() {
            let slot = &self.slots[i];
            let resumed = match &slot.status {
                Status::Active(active) => {
                    let waited = active
                        .sync
                        .waited
                        .iter()
                        .find_map(|p| match_with(p, &event, &active.bindings));
                    let requested = active.sync.requested.contains(&event);
                    if waited.is_none() && !requested {
                        continue;
                    }
                    if let Status::Active(active) = &mut self.slots[i].status {
                        active.bindings.extend(waited.unwrap_or_default());
                    }
                    self.resume_slot(i, Some(&event), false)
                }
                Status::Dormant => {
                    let Some(bindings) = slot.trigger.as_ref().and_then(|t| match_event(t, &event)) else {
                        continue;
                    };
                    let run = slot.script.start();
                    self.slots[i].status = Status::Active(Active {
                        run,
                        sync: SyncPoint::default(),
                        sync_index: 0,
                        bindings,
                    });
                    self.resume_slot(i, Some(&event), true)
                }
                Status::Finished => continue,
            };
            let resumed = match resumed {
                Ok(r) => r,
                Err(e) => {
                    self.broken = true;
                    return Err(e);
                }
            };
            advanced.push(self.slots[i].id.clone());
            if let Resumed::Failed(message) = resumed {
                failed = Some((self.slots[i].id.clone(), message));
                break;
            }
        }

        self.history.push(TraceStep {
            index,
            event: event.clone(),
            advanced: advanced.clone(),
        });
        Ok(match failed {
            None => StepOutcome::Selected { index, event, advanced },
            Some((scenario, message)) => {
                self.failure = Some((scenario.clone(), message.clone()));
                StepOutcome::Failed {
                    index,
                    event,
                    advanced,
                    scenario,
                    message,
                }
            }
        })
    }

    /// Steps until quiescence, assertion failure or `budget` steps taken in
    /// this call, and returns the whole trace since activation.
    pub fn run(&mut self, budget: usize) -> Result<ExecutionTrace, EngineError> {
        if budget == 0 {
            return Err(EngineError::ZeroBudget);
        }
        let mut taken = 0;
        let terminal = loop {
            if let Some((scenario, message)) = &self.failure {
                break Terminal::AssertionFailure {
                    scenario: scenario.clone(),
                    message: message.clone(),
                };
            }
            if taken == budget {
                break if self.selectable().is_empty() {
                    Terminal::Quiescence
                } else {
                    Terminal::BudgetExhausted
                };
            }
            match self.step()? {
                StepOutcome::Quiescent => break Terminal::Quiescence,
                StepOutcome::Selected { .. } | StepOutcome::Failed { .. } => taken += 1,
            }
        };
        Ok(ExecutionTrace {
            now: self.now,
            steps: self.history.clone(),
            terminal,
        })
    }

    fn slot(&self, id: &str) -> Option<&Slot> {
        self.slots.iter().find(|s| s.id == id)
    }

    fn active(&self) -> impl Iterator<Item = (&Slot, &Active)> {
        self.slots.iter().filter_map(|s| match &s.status {
            Status::Active(a) => Some((s, a)),
            _ => None,
        })
    }

    fn resume_slot(&mut self, i: usize, event: Option<&Event>, fresh: bool) -> Result<Resumed, EngineError> {
        let now = self.now;
        let slot = &mut self.slots[i];
        let Status::Active(active) = &mut slot.status else {
            unreachable!("resume on inactive scenario");
        };
        let ctx = ResumeContext {
            bindings: &active.bindings,
            event,
            now,
        };
        match active.run.resume(&ctx) {
            Err(failure) => {
                slot.status = if slot.trigger.is_some() {
                    Status::Dormant
                } else {
                    Status::Finished
                };
                Ok(Resumed::Failed(failure.message))
            }
            Ok(None) => {
                slot.status = if slot.trigger.is_some() {
                    Status::Dormant
                } else {
                    Status::Finished
                };
                Ok(Resumed::Completed)
            }
            Ok(Some(sync)) => {
                if sync.is_empty() {
                    return Err(EngineError::EmptySyncPoint(slot.id.clone()));
                }
                let objects = &self.program_objects[slot.program];
                for pattern in sync.waited.iter().chain(&sync.forbidden) {
                    check_pattern(&slot.id, pattern, objects)?;
                }
                for object in sync.requested.iter().flat_map(|e| [&e.sender, &e.receiver]) {
                    if !objects.contains(object) {
                        return Err(EngineError::UnknownObject {
                            scenario: slot.id.clone(),
                            object: object.to_string(),
                        });
                    }
                }
                if !fresh {
                    active.sync_index += 1;
                }
                active.sync = sync;
                Ok(Resumed::Paused)
            }
        }
    }
}

fn check_pattern(scenario: &str, pattern: &EventPattern, objects: &BTreeSet<ObjectRef>) -> Result<(), EngineError> {
    if !pattern.is_well_formed() {
        return Err(EngineError::RepeatedFreeName {
            scenario: scenario.to_string(),
            pattern: pattern.to_string(),
        });
    }
    for object in pattern.objects() {
        if !objects.contains(object) {
            return Err(EngineError::UnknownObject {
                scenario: scenario.to_string(),
                object: object.to_string(),
            });
        }
    }
    Ok(())
}
