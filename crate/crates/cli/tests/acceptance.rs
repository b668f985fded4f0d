//! Acceptance checks for the toolkit. Runs as a plain binary so that every
//! criterion prints one PASS or FAIL line, then exits non-zero if any failed.

use std::collections::BTreeSet;
use std::path::Path;
use std::process::{Command, Output};
use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};
use tdss_core::ceg::{build_graph, classify, derive_tests, extract, Causality, Requirement, RequirementKind};
use tdss_core::dsl::{lower_specs, lower_test, parse_scenario_doc};
use tdss_core::engine::{
    Bindings, EngineState, Event, EventPattern, FixedScript, Scenario, ScenarioProgram, ScenarioStatus, SenderPattern,
    Slot, StepOutcome, SyncPoint, DEFAULT_STEP_BUDGET,
};
use tdss_core::harness::{run_test, Inconclusive, Verdict};
use tdss_core::model::{check_consistency, ElementKind, Relation, SystemModel};
use tdss_core::{Timestamp, Value};

type Check = Result<(), String>;
type Criterion = (&'static str, fn() -> Check);
type Gate = Box<dyn Fn(u32) -> bool>;

fn ensure(ok: bool, why: impl FnOnce() -> String) -> Check {
    if ok {
        Ok(())
    } else {
        Err(why())
    }
}

fn tdss(root: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tdss"))
        .arg("--root")
        .arg(root)
        .args(args)
        .env("TDSS_NOW", "1767225600000")
        .env_remove("TDSS_BUDGET")
        .output()
        .expect("tdss binary runs")
}

fn example_project() -> Result<tempfile::TempDir, String> {
    let dir = tempfile::tempdir().map_err(|e| e.to_string())?;
    let out = tdss(dir.path(), &["init", "--example"]);
    ensure(out.status.success(), || {
        format!("init failed: {}", String::from_utf8_lossy(&out.stderr))
    })?;
    Ok(dir)
}

// ---- CEG counts ----

const TM_710: &str = "The software of the OBC must set the clock time of the Hardware-Timer (Real Time Clock) to the time contained in the CAN message \"CanMessageTimerCharging\" when triggered by the Signal \"TimerChargingRequest\".";
const TM_708: &str = "After the customer has activated the timer charging function and set the destination SOC and the departure time, the software of the OBC shall transmit this data to the Application.";

fn ceg_counts() -> Check {
    let started = Instant::now();
    for (id, text, expected) in [("TM_710", TM_710, 2), ("TM_708", TM_708, 4)] {
        let req = Requirement::new(id, RequirementKind::Functional, text);
        ensure(classify(&req) == Causality::Causal, || {
            format!("{id} classified non-causal")
        })?;
        let conditional = extract(&req).map_err(|e| format!("{id}: {e}"))?;
        let n = derive_tests(&build_graph(&conditional), id).len();
        ensure(n == expected, || format!("{id}: {n} cases, expected {expected}"))?;
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(1), || format!("took {elapsed:?}"))
}

// ---- MC/DC oracle ----

/// Smallest sets of truth-table rows that contain one independence pair per
/// cause, by trying every combination of pairs.
fn minimal_independence_suites(n: usize, f: &dyn Fn(u32) -> bool) -> Vec<BTreeSet<u32>> {
    let pairs: Vec<Vec<[u32; 2]>> = (0..n)
        .map(|i| {
            (0..1u32 << n)
                .filter(|r| r & (1 << i) == 0 && f(*r) != f(r | (1 << i)))
                .map(|r| [r, r | (1 << i)])
                .collect()
        })
        .collect();
    let combos: usize = pairs.iter().map(Vec::len).product();
    let mut best: Vec<BTreeSet<u32>> = Vec::new();
    for mut k in 0..combos {
        let mut rows = BTreeSet::new();
        for p in &pairs {
            rows.extend(p[k % p.len()]);
            k /= p.len();
        }
        let current = best.first().map_or(usize::MAX, BTreeSet::len);
        if rows.len() < current {
            best = vec![rows];
        } else if rows.len() == current && !best.contains(&rows) {
            best.push(rows);
        }
    }
    best
}

fn mcdc_oracle() -> Check {
    let started = Instant::now();
    for n in 1..=6usize {
        let all = (1u32 << n) - 1;
        let gates: [(&str, Gate); 2] = [("and", Box::new(move |r| r == all)), ("or", Box::new(|r| r != 0))];
        for (connective, f) in &gates {
            let causes: Vec<String> = (1..=n).map(|i| format!("input {i} is set")).collect();
            let text = format!(
                "If {}, the unit shall respond.",
                causes.join(&format!(" {connective} "))
            );
            let req = Requirement::new("R", RequirementKind::Functional, text);
            let graph = build_graph(&extract(&req).map_err(|e| e.to_string())?);
            let derived: BTreeSet<u32> = derive_tests(&graph, "R")
                .iter()
                .map(|c| {
                    c.values()
                        .iter()
                        .enumerate()
                        .fold(0, |acc, (i, &v)| acc | (u32::from(v) << i))
                })
                .collect();
            let oracle = minimal_independence_suites(n, f.as_ref());
            ensure(oracle.len() == 1 && oracle[0].len() == n + 1, || {
                format!("{connective} n={n}: oracle found {oracle:?}")
            })?;
            ensure(derived == oracle[0], || {
                format!("{connective} n={n}: derived {derived:?}, oracle {:?}", oracle[0])
            })?;
        }
    }
    let elapsed = started.elapsed();
    ensure(elapsed < Duration::from_secs(10), || format!("took {elapsed:?}"))
}

// ---- TDSS red/green ----

const OBJECTS: &str =
    "object customer\nobject hmiControlUnit\nobject obc.comStack\nobject obc.rtcHandler\nobject obc.application\n";

const CUSTOMER_TEST: &str = "scenario TM_710_TestID_1 test
  request customer -> hmiControlUnit.configureTimerCharging(true, 100, now + 6h)
  request hmiControlUnit -> obc.comStack.timerChargingRequest(true, 100, now + 6h)
  wait obc.rtcHandler -> obc.application.timerChargingUserCfg into soc, departure
  assert soc == 100 and departure == now + 6h
";

const FORWARD_SPEC: &str = "scenario forward spec
  when * -> obc.comStack.timerChargingRequest into active, soc, departure
  request obc.comStack -> obc.rtcHandler.timerChargingRequest(active, soc, departure)
  if active and soc > 0 and departure > now
    request obc.rtcHandler -> obc.application.timerChargingUserCfg(soc, departure)
";

fn tdss_verdict(spec_body: &str) -> Result<Verdict, String> {
    let parse = |body: &str| parse_scenario_doc(&format!("program p\n{OBJECTS}\n{body}")).map_err(|d| format!("{d:?}"));
    let tests = parse(CUSTOMER_TEST)?;
    let spec = lower_specs(&parse(spec_body)?);
    let test = lower_test(&tests, "TM_710_TestID_1").ok_or("test missing")?;
    let run = run_test(&spec, &test, DEFAULT_STEP_BUDGET, Timestamp(1_767_225_600_000)).map_err(|e| e.to_string())?;
    Ok(run.verdict)
}

fn tdss_red_green() -> Check {
    let mutated = FORWARD_SPEC.replace(
        "timerChargingUserCfg(soc, departure)",
        "timerChargingUserCfg(departure, soc)",
    );
    for _ in 0..2 {
        let red = tdss_verdict("")?;
        ensure(red == Verdict::Inconclusive(Inconclusive::Quiescence), || {
            format!("empty spec gave {red}")
        })?;
        let green = tdss_verdict(FORWARD_SPEC)?;
        ensure(green == Verdict::Pass, || format!("modeled spec gave {green}"))?;
        let wrong = tdss_verdict(&mutated)?;
        ensure(matches!(wrong, Verdict::Fail(_)), || {
            format!("mutated spec gave {wrong}")
        })?;
    }
    Ok(())
}

// ---- engine safety ----

const NAMES: [&str; 3] = ["a", "b", "c.d"];

fn random_event(rng: &mut StdRng) -> Event {
    Event::new(
        NAMES[rng.random_range(0..3)],
        NAMES[rng.random_range(0..3)],
        ["x", "y"][rng.random_range(0..2)],
        vec![Value::Integer(rng.random_range(0..2))],
    )
}

fn random_pattern(rng: &mut StdRng) -> EventPattern {
    let e = random_event(rng);
    EventPattern {
        sender: if rng.random_bool(0.4) {
            SenderPattern::Any
        } else {
            SenderPattern::Exactly(e.sender.clone())
        },
        receiver: e.receiver,
        label: e.label,
        slots: vec![if rng.random_bool(0.5) {
            Slot::Free("v".into())
        } else {
            Slot::Bound(e.parameters[0].clone())
        }],
    }
}

fn random_program(rng: &mut StdRng) -> (ScenarioProgram, Vec<Option<EventPattern>>) {
    let mut program = ScenarioProgram::new("random").with_objects(NAMES);
    let mut triggers = Vec::new();
    for i in 0..rng.random_range(1..=5) {
        let sync_points = (0..rng.random_range(1..=4))
            .map(|_| loop {
                let sp = SyncPoint {
                    requested: (0..rng.random_range(0..3)).map(|_| random_event(rng)).collect(),
                    waited: (0..rng.random_range(0..2)).map(|_| random_pattern(rng)).collect(),
                    forbidden: (0..rng.random_range(0..2)).map(|_| random_pattern(rng)).collect(),
                };
                if !sp.is_empty() {
                    break sp;
                }
            })
            .collect();
        let trigger = rng.random_bool(0.3).then(|| random_pattern(rng));
        triggers.push(trigger.clone());
        program = program.with_scenario(Scenario::new(format!("s{i}"), trigger, FixedScript::new(sync_points)));
    }
    (program, triggers)
}

fn pattern_matches(p: &EventPattern, e: &Event, bound: &Bindings) -> bool {
    let sender = match &p.sender {
        SenderPattern::Any => true,
        SenderPattern::Exactly(o) => *o == e.sender,
    };
    sender
        && p.receiver == e.receiver
        && p.label == e.label
        && p.slots.len() == e.parameters.len()
        && p.slots.iter().zip(&e.parameters).all(|(s, v)| match s {
            Slot::Bound(b) => b == v,
            Slot::Free(name) => bound.get(name).is_none_or(|b| b == v),
        })
}

fn safety_run(
    program: &ScenarioProgram,
    triggers: &[Option<EventPattern>],
) -> Result<Vec<(Event, Vec<String>)>, String> {
    let ids: Vec<String> = (0..triggers.len()).map(|i| format!("s{i}")).collect();
    let mut state = EngineState::activate(program, Timestamp(0)).map_err(|e| e.to_string())?;
    let mut steps = Vec::new();
    for _ in 0..40 {
        let active: Vec<(String, SyncPoint, Bindings)> = ids
            .iter()
            .filter_map(|id| Some((id.clone(), state.sync_point(id)?.clone(), state.bindings(id)?.clone())))
            .collect();
        let dormant: Vec<bool> = ids
            .iter()
            .map(|id| state.status(id) == Some(ScenarioStatus::Dormant))
            .collect();
        let selectable = |e: &Event| {
            active.iter().any(|(_, sp, _)| sp.requested.contains(e))
                && !active
                    .iter()
                    .any(|(_, sp, b)| sp.forbidden.iter().any(|p| pattern_matches(p, e, b)))
        };
        let any_selectable = active.iter().any(|(_, sp, _)| sp.requested.iter().any(selectable));
        match state.step().map_err(|e| e.to_string())? {
            StepOutcome::Quiescent => {
                ensure(!any_selectable, || "quiescent although an event was selectable".into())?;
                return Ok(steps);
            }
            StepOutcome::Selected { event, advanced, .. } => {
                ensure(selectable(&event), || {
                    format!("selected {event:?}, not requested or forbidden")
                })?;
                for (i, id) in ids.iter().enumerate() {
                    let at = active.iter().find(|(a, _, _)| a == id);
                    let moved = at.is_some_and(|(_, sp, b)| {
                        sp.requested.contains(&event) || sp.waited.iter().any(|p| pattern_matches(p, &event, b))
                    }) || (dormant[i]
                        && triggers[i]
                            .as_ref()
                            .is_some_and(|t| pattern_matches(t, &event, &Bindings::new())));
                    ensure(advanced.contains(id) == moved, || {
                        format!("{id} advanced wrongly on {event:?}")
                    })?;
                }
                steps.push((event, advanced));
            }
            StepOutcome::Failed { .. } => return Err("fixed script failed".into()),
        }
    }
    Ok(steps)
}

fn engine_safety() -> Check {
    let mut rng = StdRng::seed_from_u64(0x7d55);
    for i in 0..1000 {
        let (program, triggers) = random_program(&mut rng);
        let first = safety_run(&program, &triggers).map_err(|e| format!("program {i}: {e}"))?;
        let second = safety_run(&program, &triggers).map_err(|e| format!("program {i}: {e}"))?;
        ensure(first == second, || format!("program {i}: traces differ between runs"))?;
    }
    Ok(())
}

// ---- walkthrough fixture ----

fn walkthrough_fixture() -> Check {
    let dir = example_project()?;
    let out = tdss(dir.path(), &["check"]);
    let stdout = String::from_utf8_lossy(&out.stdout);
    ensure(out.status.success() && stdout.trim() == "0 findings (0 errors)", || {
        format!("check reported:\n{stdout}")
    })?;
    let text = std::fs::read_to_string(dir.path().join("model.json")).map_err(|e| e.to_string())?;
    let model = SystemModel::from_json(&text).map_err(|e| e.to_string())?;
    let systems: Vec<&str> = model
        .elements_of(ElementKind::InteractingSystem)
        .chain(model.elements_of(ElementKind::LogicalElement))
        .map(|e| e.name.as_str())
        .collect();
    for name in [
        "User interface",
        "Gateway control unit",
        "Power supply control unit",
        "On-board charger",
    ] {
        ensure(systems.contains(&name), || format!("missing {name}"))?;
    }
    for env in ["SwIT", "SysIT"] {
        ensure(model.kind_of(env) == Some(ElementKind::TestEnvironment), || {
            format!("missing {env}")
        })?;
    }
    ensure(
        model.kind_of("SwIT.debugInterface") == Some(ElementKind::TestEnvironmentObject),
        || "SwIT has no debug interface".into(),
    )?;
    let links: Vec<_> = model
        .links()
        .iter()
        .filter(|l| {
            l.relation == Relation::LinkedTo
                && model.kind_of(&l.source) == Some(ElementKind::StakeholderRequirement)
                && model.kind_of(&l.target) == Some(ElementKind::ApplicationScenario)
        })
        .cloned()
        .collect();
    ensure(!links.is_empty(), || "no requirement-scenario links".into())?;
    for link in links {
        let mut edited = model.clone();
        edited.remove_link(&link);
        let n = check_consistency(&edited).len();
        ensure(n == 1, || {
            format!("removing {} -> {} gave {n} findings", link.source, link.target)
        })?;
    }
    Ok(())
}

// ---- concern overview ----

fn view_roles() -> Check {
    let dir = example_project()?;
    let out = tdss(
        dir.path(),
        &["view", "validation-concern-overview", "VC_1", "--csv", "out/vc1.csv"],
    );
    ensure(out.status.success(), || {
        String::from_utf8_lossy(&out.stderr).into_owned()
    })?;
    let mut reader = csv::Reader::from_path(dir.path().join("out/vc1.csv")).map_err(|e| e.to_string())?;
    let model = SystemModel::from_json(&std::fs::read_to_string(dir.path().join("model.json")).unwrap())
        .map_err(|e| e.to_string())?;
    let mut addressed = BTreeSet::new();
    let mut relevant = BTreeSet::new();
    for record in reader.records() {
        let record = record.map_err(|e| e.to_string())?;
        match &record[0] {
            "addressed" => addressed.insert(record[1].to_string()),
            "potentially-relevant" => relevant.insert(record[1].to_string()),
            _ => false,
        };
    }
    let count = |set: &BTreeSet<String>, kind| set.iter().filter(|id| model.kind_of(id) == Some(kind)).count();
    ensure(count(&addressed, ElementKind::ApplicationScenario) == 1, || {
        format!("addressed {addressed:?}")
    })?;
    ensure(count(&addressed, ElementKind::StakeholderRequirement) == 2, || {
        format!("addressed {addressed:?}")
    })?;
    let scenario = addressed
        .iter()
        .find(|id| model.kind_of(id) == Some(ElementKind::ApplicationScenario))
        .unwrap();
    let expected: BTreeSet<String> = model
        .sources_of(scenario, Relation::LinkedTo, ElementKind::StakeholderRequirement)
        .filter(|r| !addressed.contains(*r))
        .map(str::to_string)
        .collect();
    ensure(relevant == expected && !relevant.is_empty(), || {
        format!("potentially relevant {relevant:?}, expected {expected:?}")
    })?;
    ensure(addressed.is_disjoint(&relevant), || "roles overlap".into())
}

// ---- diagram goldens ----

fn diagram_goldens() -> Check {
    let goldens = [
        (
            "VG_1.TM_708.1.seq.txt",
            include_str!("../../core/fixtures/walkthrough/golden/VG_1.TM_708.1.seq.txt"),
        ),
        (
            "VG_1.TM_710.1.seq.txt",
            include_str!("../../core/fixtures/walkthrough/golden/VG_1.TM_710.1.seq.txt"),
        ),
    ];
    let dir = example_project()?;
    for round in 0..2 {
        let out = tdss(dir.path(), &["validate", "VG_1"]);
        ensure(out.status.success(), || {
            format!(
                "validate failed: {}{}",
                String::from_utf8_lossy(&out.stdout),
                String::from_utf8_lossy(&out.stderr)
            )
        })?;
        for (file, golden) in goldens {
            let produced = std::fs::read_to_string(dir.path().join("out").join(file)).map_err(|e| e.to_string())?;
            ensure(produced == golden, || {
                format!("round {round}: {file} differs from the golden file")
            })?;
        }
    }
    Ok(())
}

fn main() {
    let checks: [Criterion; 7] = [
        ("CEG counts for TM_710 and TM_708", ceg_counts),
        ("MC/DC suites equal the truth-table oracle", mcdc_oracle),
        ("TDSS red, green and fail verdicts", tdss_red_green),
        ("engine safety over 1000 random programs", engine_safety),
        ("walkthrough fixture consistency", walkthrough_fixture),
        ("validation concern overview role split", view_roles),
        ("validation goal diagrams match golden files", diagram_goldens),
    ];
    let mut failed = 0;
    for (name, check) in checks {
        match check() {
            Ok(()) => println!("PASS  {name}"),
            Err(why) => {
                failed += 1;
                println!("FAIL  {name}: {why}");
            }
        }
    }
    println!("{} of {} acceptance criteria met", checks.len() - failed, checks.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
