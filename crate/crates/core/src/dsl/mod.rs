//! The `.scn` scenario language.
//!
//! A file declares one program, the objects it talks about and any number of
//! `spec` and `test` scenarios:
//!
//! ```text
//! program charging
//! object hmiControlUnit
//! object obc.comStack
//!
//! scenario TM_708.1 test
//!   request hmiControlUnit -> obc.comStack.timerChargingRequest(true, 100, now + 6h)
//!   wait * -> hmiControlUnit.ack(?) into ok
//!   assert ok, "not acknowledged"
//! ```

mod ast;
pub mod expr;
mod lexer;
mod lower;
mod parser;
mod pretty;


use std::fmt;

pub use ast::*;
pub use lower::{lower_where, DslScript, Instr};
pub use pretty::{expr as print_expr, print};

use crate::engine::ScenarioProgram;

/// A positioned parse or check error. Lines and columns are 1-based.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Diagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl Diagnostic {
    pub fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        Diagnostic {
            line,
            column,
            message: message.into(),
        }
    }

    /// `<file>:<line>:<col>: <message>`
    pub fn render(&self, file: &str) -> String {
        format!("{file}:{}:{}: {}", self.line, self.column, self.message)
    }
}

impl fmt::Display for Diagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}:{}: {}", self.line, self.column, self.message)
    }
}

/// All diagnostics of one file.
#[derive(Clone, Debug, PartialEq, Eq, thiserror::Error)]
#[error("{}", render_all(.file, .diagnostics))]
pub struct ParseError {
    pub file: String,
    pub diagnostics: Vec<Diagnostic>,
}

fn render_all(file: &str, diagnostics: &[Diagnostic]) -> String {
    diagnostics
        .iter()
        .map(|d| d.render(file))
        .collect::<Vec<_>>()
        .join("\n")
}

/// Parses and checks `text`. On failure every diagnostic is returned.
pub fn parse_scenario_doc(text: &str) -> Result<ScenarioDoc, Vec<Diagnostic>> {
    parser::parse(text)
}

/// Like [`parse_scenario_doc`], naming `file` in the error.
pub fn parse_file(file: &str, text: &str) -> Result<ScenarioDoc, ParseError> {
    parse_scenario_doc(text).map_err(|diagnostics| ParseError {
        file: file.to_string(),
        diagnostics,
    })
}

/// Every scenario of the document, spec and test alike, in file order.
pub fn lower(doc: &ScenarioDoc) -> ScenarioProgram {
    lower_where(doc, &doc.program, |_| true)
}

/// Only the `spec` scenarios.
pub fn lower_specs(doc: &ScenarioDoc) -> ScenarioProgram {
    lower_where(doc, &doc.program, |d| d.kind == ScenarioKind::Spec)
}

/// A program holding the single test scenario `test_id`, or `None` if the
/// document has no such test.
pub fn lower_test(doc: &ScenarioDoc, test_id: &str) -> Option<ScenarioProgram> {
    doc.scenarios
        .iter()
        .any(|d| d.kind == ScenarioKind::Test && d.id == test_id)
        .then(|| lower_where(doc, test_id, |d| d.kind == ScenarioKind::Test && d.id == test_id))
}

impl ScenarioDoc {
    pub fn tests(&self) -> impl Iterator<Item = &ScenarioDef> {
        self.scenarios.iter().filter(|d| d.kind == ScenarioKind::Test)
    }

    pub fn scenario(&self, id: &str) -> Option<&ScenarioDef> {
        self.scenarios.iter().find(|d| d.id == id)
    }
}
