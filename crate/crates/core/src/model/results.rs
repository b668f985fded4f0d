use super::{ElementKind, ModelElement, ModelError, Relation, SystemModel};
use crate::harness::SuiteReport;
use crate::value::{Timestamp, Value};

/// Returns a copy of `model` with one new TestResult per run, linked from its
/// test case and, when the case belongs to a test with an environment, to
/// that environment. Earlier results stay. Result ids are
/// `<case>.result.<n>`, counting from 1 per case.
pub fn record_test_results(
    model: &SystemModel,
    report: &SuiteReport,
    at: Timestamp,
) -> Result<SystemModel, ModelError> {
    for run in &report.runs {
        model.require_kind(&run.test_id, ElementKind::TestCase)?;
    }
    let mut next = model.clone();
    for run in &report.runs {
        let case = run.test_id.as_str();
        let mut n = next
            .targets_of(case, Relation::ResultsIn, ElementKind::TestResult)
            .count()
            + 1;
        while next.contains(&format!("{case}.result.{n}")) {
            n += 1;
        }
        let id = format!("{case}.result.{n}");
        let mut element = ModelElement::new(&id, ElementKind::TestResult, format!("{case} run {n}"))
            .with_attribute("verdict", run.verdict.keyword())
            .with_attribute("timestamp", Value::Timestamp(at))
            .with_attribute("steps", run.trace.steps.len() as i64);
        if let crate::harness::Verdict::Fail(message) = &run.verdict {
            element = element.with_attribute("message", message.as_str());
        }
        next.add_element(element)?;
        next.link(case, Relation::ResultsIn, &id)?;
        let environment = next
            .sources_of(case, Relation::ComposedOf, ElementKind::Test)
            .flat_map(|test| next.targets_of(test, Relation::ComposedOf, ElementKind::TestEnvironment))
            .next()
            .map(str::to_string);
        if let Some(environment) = environment {
            next.link(&id, Relation::ExecutedOn, &environment)?;
        }
    }
    Ok(next)
}

/// The most recently recorded result of a test case.
pub fn latest_result<'a>(model: &'a SystemModel, case: &str) -> Option<&'a ModelElement> {
    model
        .targets_of(case, Relation::ResultsIn, ElementKind::TestResult)
        .last()
        .and_then(|id| model.element(id))
}

/// A goal is green when it has test cases and the latest result of every
/// case of every test scenario validating it is a pass.
pub fn goal_is_green(model: &SystemModel, goal: &str) -> bool {
    let mut cases = model
        .sources_of(goal, Relation::Validates, ElementKind::TestScenario)
        .flat_map(|ts| model.targets_of(ts, Relation::ComposedOf, ElementKind::TestCase))
        .peekable();
    cases.peek().is_some()
        && cases
            .all(|case| latest_result(model, case).and_then(|r| r.attribute("verdict")) == Some(&Value::from("pass")))
}
