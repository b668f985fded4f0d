//! Views: read-only projections of the model into tables of element ids.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;

use super::{ElementKind, ModelError, Relation, SystemModel};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ViewKind {
    ValidationConcernOverview,
    TestCaseSpecification,
    ValidationGoalSpecification,
    RequirementStructure,
    Context,
}

impl ViewKind {
    pub const ALL: &'static [ViewKind] = &[
        ViewKind::ValidationConcernOverview,
        ViewKind::TestCaseSpecification,
        ViewKind::ValidationGoalSpecification,
        ViewKind::RequirementStructure,
        ViewKind::Context,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            ViewKind::ValidationConcernOverview => "validation-concern-overview",
            ViewKind::TestCaseSpecification => "test-case-specification",
            ViewKind::ValidationGoalSpecification => "validation-goal-specification",
            ViewKind::RequirementStructure => "requirement-structure",
            ViewKind::Context => "context",
        }
    }

    fn columns(self) -> &'static [&'static str] {
        match self {
            ViewKind::ValidationConcernOverview => &["element", "via"],
            ViewKind::TestCaseSpecification => &["requirement", "test", "test-case", "environment", "result"],
            ViewKind::ValidationGoalSpecification => &["goal", "depends-on", "test-scenario", "test-case"],
            ViewKind::RequirementStructure => &["requirement", "concern", "application-scenario", "use-case"],
            ViewKind::Context => &["use-case", "actor"],
        }
    }
}

impl fmt::Display for ViewKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for ViewKind {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        ViewKind::ALL
            .iter()
            .copied()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| format!("unknown view `{s}`"))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Role {
    Addressed,
    PotentiallyRelevant,
    Result,
}

impl Role {
    pub fn as_str(self) -> &'static str {
        match self {
            Role::Addressed => "addressed",
            Role::PotentiallyRelevant => "potentially-relevant",
            Role::Result => "result",
        }
    }
}

impl fmt::Display for Role {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

/// One row of ids, aligned with [`ViewResult::columns`]. Empty cells are
/// `None`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Row {
    pub role: Option<Role>,
    pub cells: Vec<Option<String>>,
}

impl Row {
    fn new(role: Option<Role>, cells: &[Option<&str>]) -> Row {
        Row {
            role,
            cells: cells.iter().map(|c| c.map(str::to_string)).collect(),
        }
    }

    /// The first cell, which names the row's subject.
    pub fn subject(&self) -> Option<&str> {
        self.cells.first().and_then(|c| c.as_deref())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ViewResult {
    pub kind: ViewKind,
    pub focus: Option<String>,
    pub columns: Vec<String>,
    pub rows: Vec<Row>,
}

impl ViewResult {
    fn new(kind: ViewKind, focus: Option<&str>, rows: Vec<Row>) -> Self {
        ViewResult {
            kind,
            focus: focus.map(str::to_string),
            columns: kind.columns().iter().map(|c| c.to_string()).collect(),
            rows,
        }
    }

    pub fn has_roles(&self) -> bool {
        self.rows.iter().any(|r| r.role.is_some())
    }

    /// Subjects of the rows tagged `role`.
    pub fn ids_with_role(&self, role: Role) -> Vec<&str> {
        self.rows
            .iter()
            .filter(|r| r.role == Some(role))
            .filter_map(Row::subject)
            .collect()
    }

    /// Header plus rows as strings, with a leading `role` column when any
    /// row is tagged. Empty cells render as `-`.
    pub fn records(&self) -> Vec<Vec<String>> {
        let with_role = self.has_roles();
        let mut header = Vec::new();
        if with_role {
            header.push("role".to_string());
        }
        header.extend(self.columns.iter().cloned());
        let mut out = vec![header];
        for row in &self.rows {
            let mut record = Vec::new();
            if with_role {
                record.push(row.role.map_or("-", Role::as_str).to_string());
            }
            record.extend(row.cells.iter().map(|c| c.clone().unwrap_or_else(|| "-".into())));
            out.push(record);
        }
        out
    }

    /// Aligned plain-text table.
    pub fn to_table(&self) -> String {
        let records = self.records();
        let widths: Vec<usize> = (0..records[0].len())
            .map(|i| records.iter().map(|r| r[i].chars().count()).max().unwrap_or(0))
            .collect();
        let mut out = String::new();
        for record in &records {
            let line: Vec<String> = record
                .iter()
                .zip(&widths)
                .map(|(cell, w)| format!("{cell:<w$}"))
                .collect();
            out.push_str(line.join("  ").trim_end());
            out.push('\n');
        }
        out
    }
}

/// Derives a view. The concern overview needs a ValidationConcern focus; the
/// test-case and requirement views accept a StakeholderRequirement focus to
/// narrow the output.
pub fn derive_view(model: &SystemModel, kind: ViewKind, focus: Option<&str>) -> Result<ViewResult, ModelError> {
    let rows = match kind {
        ViewKind::ValidationConcernOverview => {
            let focus = focus.ok_or_else(|| ModelError::UnknownElement("<missing focus>".into()))?;
            model.require_kind(focus, ElementKind::ValidationConcern)?;
            concern_overview(model, focus)
        }
        ViewKind::TestCaseSpecification => test_case_specification(model, requirements(model, focus)?),
        ViewKind::RequirementStructure => requirement_structure(model, requirements(model, focus)?),
        ViewKind::ValidationGoalSpecification => {
            if let Some(goal) = focus {
                model.require_kind(goal, ElementKind::ValidationGoal)?;
            }
            goal_specification(model, focus)
        }
        ViewKind::Context => {
            if let Some(uc) = focus {
                model.require_kind(uc, ElementKind::UseCase)?;
            }
            context(model, focus)
        }
    };
    Ok(ViewResult::new(kind, focus, rows))
}

fn requirements<'a>(model: &'a SystemModel, focus: Option<&'a str>) -> Result<Vec<&'a str>, ModelError> {
    match focus {
        Some(id) => {
            model.require_kind(id, ElementKind::StakeholderRequirement)?;
            Ok(vec![id])
        }
        None => Ok(model
            .elements_of(ElementKind::StakeholderRequirement)
            .map(|e| e.id.as_str())
            .collect()),
    }
}

fn concern_overview(model: &SystemModel, concern: &str) -> Vec<Row> {
    use ElementKind::*;
    let addressed: Vec<&str> = model.targets(concern, Relation::Addresses).collect();
    let addressed_set: BTreeSet<&str> = addressed.iter().copied().collect();
    let mut rows: Vec<Row> = addressed
        .iter()
        .map(|id| Row::new(Some(Role::Addressed), &[Some(id), None]))
        .collect();

    let scenarios: Vec<&str> = addressed
        .iter()
        .copied()
        .filter(|id| model.kind_of(id) == Some(ApplicationScenario))
        .collect();
    let mut listed = BTreeSet::new();
    for req in model.elements_of(StakeholderRequirement) {
        if addressed_set.contains(req.id.as_str()) {
            continue;
        }
        let via = model
            .targets_of(&req.id, Relation::LinkedTo, ApplicationScenario)
            .find(|s| scenarios.contains(s));
        if let Some(via) = via {
            if listed.insert(req.id.as_str()) {
                rows.push(Row::new(Some(Role::PotentiallyRelevant), &[Some(&req.id), Some(via)]));
            }
        }
    }

    // Results of earlier runs: every recorded result of a test case that
    // belongs to a test validating an addressed element.
    for test in model.elements_of(Test) {
        let relevant = model
            .targets(&test.id, Relation::Validates)
            .any(|t| addressed_set.contains(t));
        if !relevant {
            continue;
        }
        for case in model.targets_of(&test.id, Relation::ComposedOf, TestCase) {
            for result in model.targets_of(case, Relation::ResultsIn, TestResult) {
                rows.push(Row::new(Some(Role::Result), &[Some(result), Some(case)]));
            }
        }
    }
    rows
}

fn test_case_specification(model: &SystemModel, requirements: Vec<&str>) -> Vec<Row> {
    use ElementKind::*;
    let mut rows = Vec::new();
    for req in requirements {
        let tests: Vec<&str> = model.sources_of(req, Relation::Validates, Test).collect();
        if tests.is_empty() {
            rows.push(Row::new(None, &[Some(req), None, None, None, None]));
        }
        for test in tests {
            let environment = model.targets_of(test, Relation::ComposedOf, TestEnvironment).next();
            let cases: Vec<&str> = model.targets_of(test, Relation::ComposedOf, TestCase).collect();
            if cases.is_empty() {
                rows.push(Row::new(None, &[Some(req), Some(test), None, environment, None]));
            }
            for case in cases {
                let result = super::latest_result(model, case).map(|r| r.id.as_str());
                rows.push(Row::new(
                    None,
                    &[Some(req), Some(test), Some(case), environment, result],
                ));
            }
        }
    }
    rows
}

fn requirement_structure(model: &SystemModel, requirements: Vec<&str>) -> Vec<Row> {
    use ElementKind::*;
    let mut rows = Vec::new();
    for req in requirements {
        let concern = model.targets_of(req, Relation::DerivesFrom, StakeholderConcern).next();
        let scenarios: Vec<&str> = model.targets_of(req, Relation::LinkedTo, ApplicationScenario).collect();
        if scenarios.is_empty() {
            let use_case = model.targets_of(req, Relation::LinkedTo, UseCase).next();
            rows.push(Row::new(None, &[Some(req), concern, None, use_case]));
        }
        for scenario in scenarios {
            let use_case = model.targets_of(scenario, Relation::Refines, UseCase).next();
            rows.push(Row::new(None, &[Some(req), concern, Some(scenario), use_case]));
        }
    }
    rows
}

/// Goals with their dependencies listed first. Goals caught in a cycle keep
/// element order after the rest.
pub(crate) fn goals_in_dependency_order(model: &SystemModel) -> Vec<&str> {
    let goals: Vec<&str> = model
        .elements_of(ElementKind::ValidationGoal)
        .map(|g| g.id.as_str())
        .collect();
    let mut placed: Vec<&str> = Vec::new();
    loop {
        let ready = goals.iter().copied().find(|g| {
            !placed.contains(g)
                && model
                    .targets_of(g, Relation::DependsOn, ElementKind::ValidationGoal)
                    .all(|d| placed.contains(&d))
        });
        match ready {
            Some(g) => placed.push(g),
            None => break,
        }
    }
    for g in &goals {
        if !placed.contains(g) {
            placed.push(g);
        }
    }
    placed
}

fn goal_specification(model: &SystemModel, focus: Option<&str>) -> Vec<Row> {
    use ElementKind::*;
    let mut rows = Vec::new();
    for goal in goals_in_dependency_order(model) {
        if focus.is_some_and(|f| f != goal) {
            continue;
        }
        for dep in model.targets_of(goal, Relation::DependsOn, ValidationGoal) {
            rows.push(Row::new(None, &[Some(goal), Some(dep), None, None]));
        }
        let scenarios: Vec<&str> = model.sources_of(goal, Relation::Validates, TestScenario).collect();
        if scenarios.is_empty() && model.targets(goal, Relation::DependsOn).next().is_none() {
            rows.push(Row::new(None, &[Some(goal), None, None, None]));
        }
        for scenario in scenarios {
            let cases: Vec<&str> = model.targets_of(scenario, Relation::ComposedOf, TestCase).collect();
            if cases.is_empty() {
                rows.push(Row::new(None, &[Some(goal), None, Some(scenario), None]));
            }
            for case in cases {
                rows.push(Row::new(None, &[Some(goal), None, Some(scenario), Some(case)]));
            }
        }
    }
    rows
}

fn context(model: &SystemModel, focus: Option<&str>) -> Vec<Row> {
    use ElementKind::*;
    let mut rows = Vec::new();
    for uc in model.elements_of(UseCase) {
        if focus.is_some_and(|f| f != uc.id) {
            continue;
        }
        for actor in model.targets(&uc.id, Relation::DerivesFrom) {
            if matches!(model.kind_of(actor), Some(Stakeholder | InteractingSystem)) {
                rows.push(Row::new(None, &[Some(&uc.id), Some(actor)]));
            }
        }
    }
    rows
}
