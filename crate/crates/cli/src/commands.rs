use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{anyhow, bail, Context, Result};
use tdss_core::ceg::{
    build_graph, classify, derive_tests, emit_test_skeletons, extract, parse_requirements, Causality, CegError,
    Requirement, RequirementKind,
};
use tdss_core::diagram::{file_name, render, trace_to_diagram};
use tdss_core::dsl::{lower, lower_specs, lower_test, ScenarioDoc};
use tdss_core::engine::{EngineState, ScenarioProgram, Terminal};
use tdss_core::harness::{run_suite, run_test, SuiteReport};
use tdss_core::model::{
    check_consistency, derive_view, goal_is_green, record_test_results, ElementKind, ModelElement, Relation, Severity,
    SystemModel, ViewKind, CAUSAL,
};
use tdss_core::{walkthrough, Timestamp, Value};

use crate::project::{read, write, ProjectLayout};

/// Settings shared by the commands that execute scenarios.
pub struct RunSettings {
    pub budget: usize,
    pub now: Timestamp,
}

const FAILED: u8 = 1;

fn verdict_code(all_passed: bool) -> ExitCode {
    if all_passed {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(FAILED)
    }
}

pub fn init(layout: &ProjectLayout, example: bool) -> Result<ExitCode> {
    let _lock = layout.lock()?;
    std::fs::create_dir_all(&layout.scenarios)?;
    std::fs::create_dir_all(&layout.output)?;
    let files: Vec<(PathBuf, String)> = if example {
        vec![
            (layout.requirements.clone(), walkthrough::REQUIREMENTS.into()),
            (layout.spec_file(), walkthrough::SPEC.into()),
            (layout.tests_file(), walkthrough::TESTS.into()),
            (layout.model.clone(), walkthrough::MODEL.into()),
        ]
    } else {
        vec![
            (layout.requirements.clone(), String::new()),
            (layout.spec_file(), "program spec\n".into()),
            (layout.tests_file(), "program tests\n".into()),
            (layout.model.clone(), SystemModel::new().to_json()),
        ]
    };
    for (path, content) in files {
        if path.exists() {
            if read(&path)? != content {
                println!("kept existing {}", path.display());
            }
            continue;
        }
        write(&path, &content)?;
        println!("created {}", path.display());
    }
    Ok(ExitCode::SUCCESS)
}

/// Parses every line on its own so that all malformed lines get reported.
fn parse_requirement_file(path: &Path, text: &str) -> Result<Vec<Requirement>> {
    let mut reqs: Vec<Requirement> = Vec::new();
    let mut diagnostics = Vec::new();
    for (i, line) in text.lines().enumerate() {
        let line_no = i + 1;
        match parse_requirements(line) {
            Ok(parsed) => {
                for req in parsed {
                    if reqs.iter().any(|r| r.id == req.id) {
                        diagnostics.push(format!(
                            "{}:{line_no}: duplicate requirement id `{}`",
                            path.display(),
                            req.id
                        ));
                    } else {
                        reqs.push(req);
                    }
                }
            }
            Err(CegError::Record { message, .. }) => {
                diagnostics.push(format!("{}:{line_no}: {message}", path.display()));
            }
            Err(other) => diagnostics.push(format!("{}:{line_no}: {other}", path.display())),
        }
    }
    if diagnostics.is_empty() {
        Ok(reqs)
    } else {
        Err(anyhow!(diagnostics.join("\n")))
    }
}

pub fn ingest(layout: &ProjectLayout, file: &Path) -> Result<ExitCode> {
    let path = layout.resolve(file);
    let reqs = parse_requirement_file(&path, &read(&path)?)?;
    let lock = layout.lock()?;
    let mut model = layout.load_model()?;
    let mut counts: BTreeMap<RequirementKind, usize> = BTreeMap::new();
    for req in &reqs {
        let causal = classify(req) == Causality::Causal;
        match model.kind_of(&req.id) {
            None => model.add_element(ModelElement::new(&req.id, ElementKind::StakeholderRequirement, &req.id))?,
            Some(ElementKind::StakeholderRequirement) => {}
            Some(other) => bail!("`{}` already exists as a {other}", req.id),
        }
        model.set_attribute(&req.id, "kind", req.kind.as_str())?;
        model.set_attribute(&req.id, "text", req.text.as_str())?;
        model.set_attribute(&req.id, CAUSAL, causal)?;
        *counts.entry(req.kind).or_default() += 1;
    }
    lock.save(&model)?;
    let count = |k| counts.get(&k).copied().unwrap_or(0);
    println!(
        "ingested {} requirements: {} functional, {} architectural-quality, {} interface",
        reqs.len(),
        count(RequirementKind::Functional),
        count(RequirementKind::ArchitecturalQuality),
        count(RequirementKind::Interface)
    );
    Ok(ExitCode::SUCCESS)
}

fn requirement_from_model(model: &SystemModel, id: &str) -> Result<Requirement> {
    let element = model
        .element(id)
        .filter(|e| e.kind == ElementKind::StakeholderRequirement)
        .ok_or_else(|| anyhow!("unknown stakeholder requirement `{id}`"))?;
    let text = |key: &str| match element.attribute(key) {
        Some(Value::Text(t)) => Ok(t.clone()),
        _ => Err(anyhow!("requirement `{id}` has no `{key}` attribute; ingest it first")),
    };
    let kind: RequirementKind = text("kind")?.parse()?;
    Ok(Requirement::new(id, kind, text("text")?))
}

pub fn gentests(layout: &ProjectLayout, ids: &[String], all: bool) -> Result<ExitCode> {
    let lock = layout.lock()?;
    let mut model = layout.load_model()?;
    let ids: Vec<String> = if all {
        model
            .elements_of(ElementKind::StakeholderRequirement)
            .map(|e| e.id.clone())
            .collect()
    } else {
        ids.to_vec()
    };
    let reqs = ids
        .iter()
        .map(|id| requirement_from_model(&model, id))
        .collect::<Result<Vec<_>>>()?;
    let mut stubs = Vec::new();
    for req in &reqs {
        if classify(req) == Causality::NonCausal {
            println!("skipped {}: not a conditional requirement", req.id);
            continue;
        }
        let cases = derive_tests(&build_graph(&extract(req)?), &req.id);
        for case in &cases {
            let id = case.id();
            if !model.contains(&id) {
                model.add_element(
                    ModelElement::new(&id, ElementKind::TestCase, &id).with_attribute("positive", case.is_positive()),
                )?;
            }
            if model.targets(&id, Relation::DerivesFrom).all(|t| t != req.id) {
                model.link(&id, Relation::DerivesFrom, &req.id)?;
            }
        }
        let path = layout.scenarios.join(format!("{}.stubs.scn", req.id));
        stubs.push((
            path.clone(),
            format!("program stubs\n\n{}", emit_test_skeletons(&cases, req)),
        ));
        println!("{}: {} test cases, stubs in {}", req.id, cases.len(), path.display());
    }
    lock.save(&model)?;
    for (path, text) in stubs {
        write(&path, &text)?;
    }
    Ok(ExitCode::SUCCESS)
}

fn test_programs(doc: &ScenarioDoc) -> Vec<ScenarioProgram> {
    doc.tests()
        .map(|t| lower_test(doc, &t.id).expect("listed test exists"))
        .collect()
}

fn requirement_links(model: &SystemModel, report: &mut SuiteReport) {
    for run in &report.runs {
        let reqs = model
            .targets_of(&run.test_id, Relation::DerivesFrom, ElementKind::StakeholderRequirement)
            .map(str::to_string)
            .collect();
        report.links.insert(run.test_id.clone(), reqs);
    }
}

fn print_report(report: &SuiteReport, extra: &BTreeMap<String, String>) {
    let mut rows = vec![vec![
        "test".to_string(),
        "verdict".into(),
        "steps".into(),
        "requirements".into(),
    ]];
    if !extra.is_empty() {
        rows[0].push("diagram".into());
    }
    for run in &report.runs {
        let mut row = vec![
            run.test_id.clone(),
            run.verdict.to_string(),
            run.trace.steps.len().to_string(),
            report
                .links
                .get(&run.test_id)
                .filter(|l| !l.is_empty())
                .map_or("-".into(), |l| l.join(",")),
        ];
        if let Some(path) = extra.get(&run.test_id) {
            row.push(path.clone());
        }
        rows.push(row);
    }
    print!("{}", align(&rows));
    let c = report.counts;
    println!(
        "{} tests: {} pass, {} fail, {} inconclusive",
        c.total(),
        c.pass,
        c.fail,
        c.inconclusive
    );
}

fn align(rows: &[Vec<String>]) -> String {
    let columns = rows.iter().map(Vec::len).max().unwrap_or(0);
    let widths: Vec<usize> = (0..columns)
        .map(|i| {
            rows.iter()
                .filter_map(|r| r.get(i))
                .map(|c| c.chars().count())
                .max()
                .unwrap_or(0)
        })
        .collect();
    rows.iter()
        .map(|r| {
            let cells: Vec<String> = r.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
            format!("{}\n", cells.join("  ").trim_end())
        })
        .collect()
}

pub fn verify(
    layout: &ProjectLayout,
    spec: Option<&Path>,
    tests: Option<&Path>,
    run: &RunSettings,
) -> Result<ExitCode> {
    let spec_path = spec.map_or_else(|| layout.spec_file(), |p| layout.resolve(p));
    let tests_path = tests.map_or_else(|| layout.tests_file(), |p| layout.resolve(p));
    let spec = layout.parse_scenarios(&spec_path)?;
    let tests = layout.parse_scenarios(&tests_path)?;
    let lock = layout.lock()?;
    let model = layout.load_model()?;
    let mut report = run_suite(&lower_specs(&spec), &test_programs(&tests), run.budget, run.now)?;
    requirement_links(&model, &mut report);
    let updated = record_test_results(&model, &report, run.now)
        .context("results can only be recorded for test cases in the model")?;
    lock.save(&updated)?;
    print_report(&report, &BTreeMap::new());
    Ok(verdict_code(report.all_passed()))
}

pub fn validate(
    layout: &ProjectLayout,
    goal: &str,
    force: bool,
    spec: Option<&Path>,
    tests: Option<&Path>,
    run: &RunSettings,
) -> Result<ExitCode> {
    let lock = layout.lock()?;
    let model = layout.load_model()?;
    if model.kind_of(goal) != Some(ElementKind::ValidationGoal) {
        bail!("unknown validation goal `{goal}`");
    }
    let scenarios: Vec<&str> = model
        .sources_of(goal, Relation::Validates, ElementKind::TestScenario)
        .collect();
    if scenarios.is_empty() {
        bail!("refusing to validate {goal}: no test scenario validates it");
    }
    for dep in model.targets_of(goal, Relation::DependsOn, ElementKind::ValidationGoal) {
        if !force && !goal_is_green(&model, dep) {
            bail!("refusing to validate {goal}: it depends on {dep}, which is not green yet (use --force to override)");
        }
    }
    let spec_path = spec.map_or_else(|| layout.spec_file(), |p| layout.resolve(p));
    let tests_path = tests.map_or_else(|| layout.tests_file(), |p| layout.resolve(p));
    let spec = lower_specs(&layout.parse_scenarios(&spec_path)?);
    let tests = layout.parse_scenarios(&tests_path)?;

    let mut runs = Vec::new();
    let mut diagrams = BTreeMap::new();
    for scenario in &scenarios {
        for case in model.targets_of(scenario, Relation::ComposedOf, ElementKind::TestCase) {
            let test = lower_test(&tests, case)
                .ok_or_else(|| anyhow!("{}: no test scenario `{case}`", tests_path.display()))?;
            let test_run = run_test(&spec, &test, run.budget, run.now)?;
            let title = format!("{goal}.{case}");
            let path = layout.output.join(file_name(&title));
            write(&path, &render(&trace_to_diagram(&test_run.trace, &title)))?;
            diagrams.insert(case.to_string(), path.display().to_string());
            runs.push(test_run);
        }
    }
    let mut report = SuiteReport::from_runs(runs);
    requirement_links(&model, &mut report);
    let updated = record_test_results(&model, &report, run.now)?;
    lock.save(&updated)?;
    print_report(&report, &diagrams);
    let green = goal_is_green(&updated, goal);
    println!("{goal}: {}", if green { "green" } else { "not green" });
    Ok(verdict_code(report.all_passed()))
}

pub fn view(layout: &ProjectLayout, kind: &str, focus: Option<&str>, csv_path: Option<&Path>) -> Result<ExitCode> {
    let kind: ViewKind = kind.parse().map_err(|e: String| anyhow!(e))?;
    let model = layout.load_model()?;
    let view = derive_view(&model, kind, focus)?;
    match csv_path {
        Some(path) => {
            let path = layout.resolve(path);
            let mut out = csv::Writer::from_writer(Vec::new());
            for record in view.records() {
                out.write_record(&record)?;
            }
            let bytes = out.into_inner().map_err(|e| anyhow!("{e}"))?;
            write(&path, &String::from_utf8(bytes)?)?;
            println!("wrote {} rows to {}", view.rows.len(), path.display());
        }
        None => print!("{}", view.to_table()),
    }
    Ok(ExitCode::SUCCESS)
}

pub fn check(layout: &ProjectLayout) -> Result<ExitCode> {
    let model = layout.load_model()?;
    let findings = check_consistency(&model);
    for finding in &findings {
        println!("{finding}");
    }
    let errors = findings.iter().filter(|f| f.severity == Severity::Error).count();
    println!("{} findings ({errors} errors)", findings.len());
    Ok(verdict_code(errors == 0))
}

pub fn run(layout: &ProjectLayout, file: &Path, diagram: Option<&str>, settings: &RunSettings) -> Result<ExitCode> {
    let doc = layout.parse_scenarios(&layout.resolve(file))?;
    let mut state = EngineState::activate(&lower(&doc), settings.now)?;
    let trace = state.run(settings.budget)?;
    print!("{}", trace.to_lines());
    println!("{}", trace.terminal);
    if let Some(title) = diagram {
        let path = layout.output.join(file_name(title));
        write(&path, &render(&trace_to_diagram(&trace, title)))?;
        println!("wrote {}", path.display());
    }
    Ok(verdict_code(!matches!(
        trace.terminal,
        Terminal::AssertionFailure { .. }
    )))
}
