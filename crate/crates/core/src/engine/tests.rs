use super::*;
use crate::value::{Timestamp, Value};

const NOW: Timestamp = Timestamp(1_700_000_000_000);

fn ev(label: &str) -> Event {
    Event::new("a", "b", label, vec![])
}

fn fixed(id: &str, sync_points: Vec<SyncPoint>) -> Scenario {
    Scenario::new(id, None, FixedScript::new(sync_points))
}

#[derive(Debug)]
struct Forever(Event);

struct ForeverRun(Event);

impl ScenarioRun for ForeverRun {
    fn resume(&mut self, _: &ResumeContext<'_>) -> Result<Option<SyncPoint>, AssertionFailure> {
        Ok(Some(SyncPoint::request(self.0.clone())))
    }
}

impl ScenarioScript for Forever {
    fn start(&self) -> Box<dyn ScenarioRun> {
        Box::new(ForeverRun(self.0.clone()))
    }
}

#[derive(Debug)]
struct FailAfterFirst;

struct FailAfterFirstRun(bool);

impl ScenarioRun for FailAfterFirstRun {
    fn resume(&mut self, _: &ResumeContext<'_>) -> Result<Option<SyncPoint>, AssertionFailure> {
        if self.0 {
            return Err(AssertionFailure::new("boom"));
        }
        self.0 = true;
        Ok(Some(SyncPoint::wait(EventPattern::exact(&ev("go")))))
    }
}

impl ScenarioScript for FailAfterFirst {
    fn start(&self) -> Box<dyn ScenarioRun> {
        Box::new(FailAfterFirstRun(false))
    }
}

#[test]
fn single_untriggered_scenario_requests_on_activation() {
    let program = ScenarioProgram::new("p").with_scenario(fixed("s", vec![SyncPoint::request(ev("e"))]));
    let state = EngineState::activate(&program, NOW).unwrap();
    assert_eq!(state.requested(), vec![&ev("e")]);
    assert_eq!(state.step_count(), 0);
    assert_eq!(state.status("s"), Some(ScenarioStatus::Active { sync_index: 0 }));
}

#[test]
fn only_triggered_scenarios_is_immediately_quiescent() {
    let trigger = EventPattern::exact(&ev("t"));
    let program = ScenarioProgram::new("p").with_scenario(Scenario::new(
        "s",
        Some(trigger),
        FixedScript::new(vec![SyncPoint::request(ev("e"))]),
    ));
    let mut state = EngineState::activate(&program, NOW).unwrap();
    assert!(state.requested().is_empty());
    assert_eq!(state.status("s"), Some(ScenarioStatus::Dormant));
    assert_eq!(state.step().unwrap(), StepOutcome::Quiescent);
}

#[test]
fn duplicate_scenario_id_is_configuration_error() {
    let program = ScenarioProgram::new("p")
        .with_scenario(fixed("s", vec![]))
        .with_scenario(fixed("s", vec![]));
    assert_eq!(
        EngineState::activate(&program, NOW).unwrap_err(),
        EngineError::DuplicateScenario("s".into())
    );
}

#[test]
fn forbid_dominates_request() {
    let program = ScenarioProgram::new("p")
        .with_scenario(fixed("req", vec![SyncPoint::request(ev("e"))]))
        .with_scenario(fixed(
            "block",
            vec![SyncPoint::wait(EventPattern::exact(&ev("x"))).with_forbidden(EventPattern::exact(&ev("e")))],
        ));
    let mut state = EngineState::activate(&program, NOW).unwrap();
    assert_eq!(state.step().unwrap(), StepOutcome::Quiescent);
    assert_eq!(state.status("req"), Some(ScenarioStatus::Active { sync_index: 0 }));
}

#[test]
fn waiter_binds_free_name() {
    let event = Event::new("a", "b", "m", vec![Value::Integer(7)]);
    let program = ScenarioProgram::new("p")
        .with_scenario(fixed("req", vec![SyncPoint::request(event.clone())]))
        .with_scenario(fixed(
            "waiter",
            vec![
                SyncPoint::wait(EventPattern::symbolic(None, "b", "m", &["p"])),
                SyncPoint::wait(EventPattern::exact(&ev("never"))),
            ],
        ));
    let mut state = EngineState::activate(&program, NOW).unwrap();
    let outcome = state.step().unwrap();
    assert_eq!(
        outcome,
        StepOutcome::Selected {
            index: 0,
            event,
            advanced: vec!["req".into(), "waiter".into()],
        }
    );
    assert_eq!(state.bindings("waiter").unwrap().get("p"), Some(&Value::Integer(7)));
    assert_eq!(state.status("waiter"), Some(ScenarioStatus::Active { sync_index: 1 }));
}

#[test]
fn untouched_scenarios_keep_their_sync_point() {
    let program = ScenarioProgram::new("p")
        .with_scenario(fixed(
            "a",
            vec![SyncPoint::request(ev("e")), SyncPoint::request(ev("f"))],
        ))
        .with_scenario(fixed("bystander", vec![SyncPoint::wait(EventPattern::exact(&ev("z")))]));
    let mut state = EngineState::activate(&program, NOW).unwrap();
    state.step().unwrap();
    assert_eq!(
        state.status("bystander"),
        Some(ScenarioStatus::Active { sync_index: 0 })
    );
    assert_eq!(state.status("a"), Some(ScenarioStatus::Active { sync_index: 1 }));
}

#[test]
fn tie_break_follows_registration_then_declaration_order() {
    let mut sp = SyncPoint::request(ev("second"));
    sp.requested.push(ev("third"));
    let program = ScenarioProgram::new("p")
        .with_scenario(fixed("late", vec![SyncPoint::wait(EventPattern::exact(&ev("none")))]))
        .with_scenario(fixed("x", vec![sp]))
        .with_scenario(fixed("y", vec![SyncPoint::request(ev("first"))]));
    let mut state = EngineState::activate(&program, NOW).unwrap();
    let StepOutcome::Selected { event, .. } = state.step().unwrap() else {
        panic!("expected a selection");
    };
    assert_eq!(event, ev("second"));
}

#[test]
fn empty_program_runs_to_quiescence_with_no_steps() {
    let mut state = EngineState::activate(&ScenarioProgram::new("empty"), NOW).unwrap();
    let trace = state.run(DEFAULT_STEP_BUDGET).unwrap();
    assert!(trace.steps.is_empty());
    assert_eq!(trace.terminal, Terminal::Quiescence);
}

#[test]
fn self_perpetuating_request_exhausts_budget() {
    let program = ScenarioProgram::new("p")
        .with_objects(["a", "b"])
        .with_scenario(Scenario::new("loop", None, Forever(ev("tick"))));
    let mut state = EngineState::activate(&program, NOW).unwrap();
    let trace = state.run(10).unwrap();
    assert_eq!(trace.steps.len(), 10);
    assert_eq!(trace.terminal, Terminal::BudgetExhausted);
    assert!(trace.steps.iter().enumerate().all(|(i, s)| s.index == i));
}

#[test]
fn zero_budget_is_rejected() {
    let mut state = EngineState::activate(&ScenarioProgram::new("p"), NOW).unwrap();
    assert_eq!(state.run(0).unwrap_err(), EngineError::ZeroBudget);
}

#[test]
fn assertion_failure_terminates_run() {
    let program = ScenarioProgram::new("p")
        .with_objects(["a", "b"])
        .with_scenario(Scenario::new("checker", None, FailAfterFirst))
        .with_scenario(fixed(
            "driver",
            vec![SyncPoint::request(ev("go")), SyncPoint::request(ev("more"))],
        ));
    let mut state = EngineState::activate(&program, NOW).unwrap();
    let trace = state.run(100).unwrap();
    assert_eq!(trace.steps.len(), 1);
    assert_eq!(
        trace.terminal,
        Terminal::AssertionFailure {
            scenario: "checker".into(),
            message: "boom".into()
        }
    );
    assert_eq!(state.step().unwrap_err(), EngineError::Terminated);
}

#[test]
fn triggered_scenario_rearms_after_completion() {
    let trigger = EventPattern::symbolic(None, "b", "go", &["n"]);
    let program = ScenarioProgram::new("p")
        .with_scenario(fixed(
            "driver",
            vec![
                SyncPoint::request(Event::new("a", "b", "go", vec![Value::Integer(1)])),
                SyncPoint::wait(EventPattern::exact(&ev("ack"))),
                SyncPoint::request(Event::new("a", "b", "go", vec![Value::Integer(2)])),
            ],
        ))
        .with_scenario(Scenario::new(
            "reactor",
            Some(trigger),
            FixedScript::new(vec![SyncPoint::request(ev("ack"))]),
        ));
    let mut state = EngineState::activate(&program, NOW).unwrap();
    let trace = state.run(100).unwrap();
    let labels: Vec<_> = trace.steps.iter().map(|s| s.event.label.as_str()).collect();
    assert_eq!(labels, ["go", "ack", "go", "ack"]);
    assert_eq!(trace.terminal, Terminal::Quiescence);
}

#[test]
fn undeclared_object_in_request_is_rejected() {
    let mut program = ScenarioProgram::new("p").with_scenario(fixed("s", vec![SyncPoint::request(ev("e"))]));
    program.objects.clear();
    program.objects.insert(ObjectRef::new("a"));
    let err = EngineState::activate(&program, NOW).unwrap_err();
    assert_eq!(
        err,
        EngineError::UnknownObject {
            scenario: "s".into(),
            object: "b".into()
        }
    );
}

#[test]
fn trace_lines_use_relative_timestamps() {
    let event = Event::new(
        "hmiControlUnit",
        "obc.comStack",
        "timerChargingRequest",
        vec![
            Value::Boolean(true),
            Value::Integer(100),
            Value::Timestamp(NOW.plus_hours(6)),
        ],
    );
    let program = ScenarioProgram::new("p").with_scenario(fixed("s", vec![SyncPoint::request(event)]));
    let trace = EngineState::activate(&program, NOW).unwrap().run(5).unwrap();
    assert_eq!(
        trace.to_lines(),
        "step 0: hmiControlUnit -> obc.comStack . timerChargingRequest(true, 100, now + 6h)\n"
    );
}
