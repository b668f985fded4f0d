use proptest::prelude::*;

use tdss_core::dsl::{lower_test, lower_where, parse_scenario_doc, ScenarioDoc};
use tdss_core::engine::{ScenarioProgram, DEFAULT_STEP_BUDGET};
use tdss_core::harness::{run_suite, run_test, Verdict};
use tdss_core::walkthrough;

fn docs() -> (ScenarioDoc, ScenarioDoc) {
    (
        parse_scenario_doc(walkthrough::SPEC).unwrap(),
        parse_scenario_doc(walkthrough::TESTS).unwrap(),
    )
}

fn test_programs(tests: &ScenarioDoc) -> Vec<ScenarioProgram> {
    tests.tests().map(|t| lower_test(tests, &t.id).unwrap()).collect()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn permuting_the_suite_keeps_every_verdict(order in Just((0..10usize).collect::<Vec<_>>()).prop_shuffle()) {
        let (spec, tests) = docs();
        let spec = lower_where(&spec, "spec", |_| true);
        let programs = test_programs(&tests);
        let baseline = run_suite(&spec, &programs, DEFAULT_STEP_BUDGET, walkthrough::NOW).unwrap();
        let shuffled: Vec<ScenarioProgram> = order.iter().map(|&i| programs[i].clone()).collect();
        let report = run_suite(&spec, &shuffled, DEFAULT_STEP_BUDGET, walkthrough::NOW).unwrap();
        for run in &report.runs {
            prop_assert_eq!(Some(run), baseline.run(&run.test_id));
        }
        prop_assert_eq!(report.counts, baseline.counts);
    }
}

#[test]
fn rerun_is_identical() {
    let (spec, tests) = docs();
    let spec = lower_where(&spec, "spec", |_| true);
    for test in test_programs(&tests) {
        let first = run_test(&spec, &test, DEFAULT_STEP_BUDGET, walkthrough::NOW).unwrap();
        let second = run_test(&spec, &test, DEFAULT_STEP_BUDGET, walkthrough::NOW).unwrap();
        assert_eq!(first, second);
    }
}

#[test]
fn removing_spec_scenarios_never_creates_a_pass() {
    let (spec, tests) = docs();
    let ids: Vec<String> = spec.scenarios.iter().map(|s| s.id.clone()).collect();
    let verdicts = |mask: usize| -> Vec<Verdict> {
        let program = lower_where(&spec, "spec", |s| {
            let i = ids.iter().position(|id| *id == s.id).unwrap();
            mask & (1 << i) != 0
        });
        run_suite(&program, &test_programs(&tests), DEFAULT_STEP_BUDGET, walkthrough::NOW)
            .unwrap()
            .runs
            .into_iter()
            .map(|r| r.verdict)
            .collect()
    };
    let full_mask = (1 << ids.len()) - 1;
    for mask in 0..=full_mask {
        for sub in (0..=mask).filter(|s| s & mask == *s) {
            for (smaller, larger) in verdicts(sub).iter().zip(verdicts(mask)) {
                assert!(!smaller.is_pass() || larger.is_pass(), "mask {sub:b} vs {mask:b}");
            }
        }
    }
    let none = verdicts(0);
    assert!(!none[0].is_pass(), "the customer test needs the specification");
}
