//! Runs test scenario programs against a specification program.
//!
//! The test program is registered first so its stimuli win selection ties.
//! Runs continue until the engine stops; a test passes once its body has
//! completed and nothing raised an assertion, regardless of what the
//! specification still has pending.

use std::collections::BTreeMap;
use std::fmt;

use crate::engine::{EngineError, EngineState, ExecutionTrace, ScenarioProgram, Terminal};
use crate::value::Timestamp;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Inconclusive {
    Quiescence,
    BudgetExhausted,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Verdict {
    Pass,
    Fail(String),
    Inconclusive(Inconclusive),
}

impl Verdict {
    /// `pass`, `fail` or `inconclusive`.
    pub fn keyword(&self) -> &'static str {
        match self {
            Verdict::Pass => "pass",
            Verdict::Fail(_) => "fail",
            Verdict::Inconclusive(_) => "inconclusive",
        }
    }

    pub fn is_pass(&self) -> bool {
        *self == Verdict::Pass
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Verdict::Pass => f.write_str("pass"),
            Verdict::Fail(message) => write!(f, "fail({message})"),
            Verdict::Inconclusive(Inconclusive::Quiescence) => f.write_str("inconclusive(quiescence)"),
            Verdict::Inconclusive(Inconclusive::BudgetExhausted) => f.write_str("inconclusive(step-budget-exhausted)"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TestRun {
    pub test_id: String,
    pub spec_program_id: String,
    pub trace: ExecutionTrace,
    pub verdict: Verdict,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Counts {
    pub pass: usize,
    pub fail: usize,
    pub inconclusive: usize,
}

impl Counts {
    pub fn total(&self) -> usize {
        self.pass + self.fail + self.inconclusive
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct SuiteReport {
    pub runs: Vec<TestRun>,
    pub counts: Counts,
    /// Model element ids each test traces to, filled in by callers that
    /// know the model.
    pub links: BTreeMap<String, Vec<String>>,
}

impl SuiteReport {
    pub fn from_runs(runs: Vec<TestRun>) -> SuiteReport {
        let mut counts = Counts::default();
        for run in &runs {
            match run.verdict {
                Verdict::Pass => counts.pass += 1,
                Verdict::Fail(_) => counts.fail += 1,
                Verdict::Inconclusive(_) => counts.inconclusive += 1,
            }
        }
        SuiteReport {
            runs,
            counts,
            links: BTreeMap::new(),
        }
    }

    pub fn all_passed(&self) -> bool {
        self.counts.pass == self.runs.len()
    }

    pub fn run(&self, test_id: &str) -> Option<&TestRun> {
        self.runs.iter().find(|r| r.test_id == test_id)
    }
}

/// Activates `test` and `spec` in one engine and runs them to a stop.
pub fn run_test(
    spec: &ScenarioProgram,
    test: &ScenarioProgram,
    budget: usize,
    now: Timestamp,
) -> Result<TestRun, EngineError> {
    let mut state = EngineState::activate_all(&[test.clone(), spec.clone()], now)?;
    let trace = state.run(budget)?;
    let verdict = match &trace.terminal {
        Terminal::AssertionFailure { scenario, message } => Verdict::Fail(format!("{scenario}: {message}")),
        _ if state.program_completed(&test.id) => Verdict::Pass,
        Terminal::BudgetExhausted => Verdict::Inconclusive(Inconclusive::BudgetExhausted),
        Terminal::Quiescence => Verdict::Inconclusive(Inconclusive::Quiescence),
    };
    Ok(TestRun {
        test_id: test.id.clone(),
        spec_program_id: spec.id.clone(),
        trace,
        verdict,
    })
}

/// Runs every test in order, each in a fresh engine.
pub fn run_suite(
    spec: &ScenarioProgram,
    tests: &[ScenarioProgram],
    budget: usize,
    now: Timestamp,
) -> Result<SuiteReport, EngineError> {
    let mut seen = std::collections::HashSet::new();
    if let Some(dup) = tests.iter().find(|t| !seen.insert(t.id.as_str())) {
        return Err(EngineError::DuplicateProgram(dup.id.clone()));
    }
    let runs = tests
        .iter()
        .map(|test| run_test(spec, test, budget, now))
        .collect::<Result<Vec<_>, _>>()?;
    Ok(SuiteReport::from_runs(runs))
}
