use std::fmt::Write as _;

use super::event::Event;
use crate::value::Timestamp;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TraceStep {
    pub index: usize,
    pub event: Event,
    /// Ids of the scenarios that advanced on this step, in registration order.
    pub advanced: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Terminal {
    Quiescence,
    BudgetExhausted,
    AssertionFailure { scenario: String, message: String },
}

impl std::fmt::Display for Terminal {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Terminal::Quiescence => f.write_str("quiescence"),
            Terminal::BudgetExhausted => f.write_str("step-budget-exhausted"),
            Terminal::AssertionFailure { scenario, message } => {
                write!(f, "assertion-failure({scenario}: {message})")
            }
        }
    }
}

/// Ordered record of selected events for one engine run.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ExecutionTrace {
    /// The run's fixed notion of `now`; timestamps render relative to it.
    pub now: Timestamp,
    pub steps: Vec<TraceStep>,
    pub terminal: Terminal,
}

impl ExecutionTrace {
    /// One `step <n>: <sender> -> <receiver> . <label>(<values>)` line per
    /// step, newline-terminated.
    pub fn to_lines(&self) -> String {
        let mut out = String::new();
        for step in &self.steps {
            let _ = writeln!(out, "step {}: {}", step.index, step.event.render(self.now));
        }
        out
    }
}
