//! Scenario execution.
//!
//! Scenarios pause at sync points declaring requested, waited-for and
//! forbidden events. Each step selects one requested event that no active
//! scenario forbids and resumes every scenario that requested it or waits
//! for it; dormant scenarios whose trigger matches start up and bind the
//! trigger's parameters.
//!
//! Selection is deterministic: the first requested, unforbidden event in
//! registration order wins, with declaration order breaking ties inside a
//! sync point.

mod event;
mod scenario;
mod state;
mod trace;

pub use event::{
    match_event, match_with, render_parameters, Bindings, Event, EventPattern, ObjectRef, SenderPattern, Slot,
};
pub use scenario::{
    AssertionFailure, FixedScript, ResumeContext, Scenario, ScenarioProgram, ScenarioRun, ScenarioScript, SyncPoint,
};
pub use state::{EngineState, ScenarioStatus, StepOutcome, DEFAULT_STEP_BUDGET};
pub use trace::{ExecutionTrace, Terminal, TraceStep};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum EngineError {
    #[error("duplicate scenario id `{0}`")]
    DuplicateScenario(String),
    #[error("duplicate program id `{0}`")]
    DuplicateProgram(String),
    #[error("scenario `{scenario}` references undeclared object `{object}`")]
    UnknownObject { scenario: String, object: String },
    #[error("scenario `{scenario}` uses a free name twice in `{pattern}`")]
    RepeatedFreeName { scenario: String, pattern: String },
    #[error("scenario `{0}` yielded a sync point with no requested, waited or forbidden events")]
    EmptySyncPoint(String),
    #[error("step budget must be at least 1")]
    ZeroBudget,
    #[error("engine run already terminated")]
    Terminated,
}

#[cfg(test)]
mod tests;
