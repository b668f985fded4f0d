use std::fmt;

use petgraph::algo::tarjan_scc;
use petgraph::graphmap::DiGraphMap;

use super::{ElementKind, Relation, SystemModel, CAUSAL};
use crate::value::Value;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Severity {
    Error,
    Warning,
}

impl fmt::Display for Severity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Severity::Error => "error",
            Severity::Warning => "warning",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Finding {
    pub severity: Severity,
    /// Offending element ids; the first one is the subject.
    pub ids: Vec<String>,
    pub message: String,
}

impl Finding {
    fn new(severity: Severity, ids: Vec<String>, message: String) -> Self {
        Finding { severity, ids, message }
    }
}

impl fmt::Display for Finding {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}: {}: {}", self.severity, self.ids.join(", "), self.message)
    }
}

/// Traceability obligations. Findings come grouped by rule, each group in
/// element order.
pub fn check_consistency(model: &SystemModel) -> Vec<Finding> {
    use ElementKind::*;
    let mut findings = Vec::new();
    let error = |id: &str, message: &str| Finding::new(Severity::Error, vec![id.to_string()], message.to_string());

    for req in model.elements_of(StakeholderRequirement) {
        if model
            .targets_of(&req.id, Relation::LinkedTo, ApplicationScenario)
            .next()
            .is_none()
        {
            findings.push(error(
                &req.id,
                "stakeholder requirement is not linked to an application scenario",
            ));
        }
    }
    for req in model.elements_of(StakeholderRequirement) {
        let causal = req.attribute(CAUSAL) == Some(&Value::Boolean(true));
        if causal
            && model
                .sources_of(&req.id, Relation::DerivesFrom, TestCase)
                .next()
                .is_none()
        {
            findings.push(error(
                &req.id,
                "causal stakeholder requirement has no derived test case",
            ));
        }
    }
    for test in model.elements_of(Test) {
        if model
            .targets_of(&test.id, Relation::ComposedOf, TestEnvironment)
            .next()
            .is_none()
        {
            findings.push(error(&test.id, "test is not composed of a test environment"));
        }
        if model
            .targets_of(&test.id, Relation::ComposedOf, TestCase)
            .next()
            .is_none()
        {
            findings.push(error(&test.id, "test is not composed of any test case"));
        }
    }
    // Missing results only matter once some suite has been run.
    if model.elements_of(TestResult).next().is_some() {
        for case in model.elements_of(TestCase) {
            if model
                .targets_of(&case.id, Relation::ResultsIn, TestResult)
                .next()
                .is_none()
            {
                findings.push(Finding::new(
                    Severity::Warning,
                    vec![case.id.clone()],
                    "test case has no test result".into(),
                ));
            }
        }
    }
    for goal in model.elements_of(ValidationGoal) {
        if model
            .sources_of(&goal.id, Relation::Validates, TestScenario)
            .next()
            .is_none()
        {
            findings.push(error(&goal.id, "validation goal is not validated by any test scenario"));
        }
    }
    for req in model.elements_of(SystemRequirement) {
        if model
            .targets_of(&req.id, Relation::DerivesFrom, StakeholderRequirement)
            .next()
            .is_none()
        {
            findings.push(error(
                &req.id,
                "system requirement does not derive from a stakeholder requirement",
            ));
        }
    }
    findings.extend(goal_cycles(model));
    findings
}

fn goal_cycles(model: &SystemModel) -> Vec<Finding> {
    let order: Vec<&str> = model
        .elements_of(ElementKind::ValidationGoal)
        .map(|g| g.id.as_str())
        .collect();
    let position = |id: &str| order.iter().position(|g| *g == id).unwrap_or(usize::MAX);
    let mut graph = DiGraphMap::<usize, ()>::new();
    for (i, _) in order.iter().enumerate() {
        graph.add_node(i);
    }
    for link in model.links().iter().filter(|l| l.relation == Relation::DependsOn) {
        graph.add_edge(position(&link.source), position(&link.target), ());
    }
    let mut cycles: Vec<Vec<usize>> = tarjan_scc(&graph)
        .into_iter()
        .filter(|scc| scc.len() > 1 || graph.contains_edge(scc[0], scc[0]))
        .map(|mut scc| {
            scc.sort_unstable();
            scc
        })
        .collect();
    cycles.sort();
    cycles
        .into_iter()
        .map(|scc| {
            Finding::new(
                Severity::Error,
                scc.iter().map(|&i| order[i].to_string()).collect(),
                "validation goals depend on each other in a cycle".into(),
            )
        })
        .collect()
}
