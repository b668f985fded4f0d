use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use proptest::prelude::*;

use tdss_core::ceg::{
    build_graph, classify, derive_tests, extract, parse_requirements, Causality, Combinator, Requirement,
    RequirementKind,
};
use tdss_core::walkthrough;

const TM_710: &str = "The software of the OBC must set the clock time of the Hardware-Timer (Real Time Clock) to the time contained in the CAN message \"CanMessageTimerCharging\" when triggered by the Signal \"TimerChargingRequest\".";
const TM_708: &str = "After the customer has activated the timer charging function and set the destination SOC and the departure time, the software of the OBC shall transmit this data to the Application.";

fn case_count(id: &str, text: &str) -> usize {
    let req = Requirement::new(id, RequirementKind::Functional, text);
    assert_eq!(classify(&req), Causality::Causal, "{id}");
    derive_tests(&build_graph(&extract(&req).unwrap()), id).len()
}

#[test]
fn quoted_requirements_yield_two_and_four_cases() {
    let started = Instant::now();
    assert_eq!(case_count("TM_710", TM_710), 2);
    assert_eq!(case_count("TM_708", TM_708), 4);
    assert!(started.elapsed() < Duration::from_secs(1));
}

#[test]
fn bundled_requirements_carry_the_quoted_texts() {
    let reqs = parse_requirements(walkthrough::REQUIREMENTS).unwrap();
    let text = |id: &str| reqs.iter().find(|r| r.id == id).unwrap().text.clone();
    assert_eq!(text("TM_708"), TM_708);
    assert_eq!(text("TM_710"), TM_710);
    let causal: Vec<&str> = reqs
        .iter()
        .filter(|r| classify(r) == Causality::Causal)
        .map(|r| r.id.as_str())
        .collect();
    assert_eq!(causal, ["TM_708", "TM_710", "TM_720", "TM_730"]);
}

fn sentence(n: usize, connective: &str) -> String {
    let causes: Vec<String> = (1..=n).map(|i| format!("sensor {i} is active")).collect();
    format!(
        "If {}, the controller shall raise the alarm.",
        causes.join(&format!(" {connective} "))
    )
}

/// Minimal unique-cause MC/DC suites found by brute force over the truth
/// table of `f`: every way of picking one independence pair per cause, kept
/// when the union of rows is as small as possible.
fn oracle_suites(n: usize, f: impl Fn(u32) -> bool) -> Vec<BTreeSet<u32>> {
    let pairs: Vec<Vec<(u32, u32)>> = (0..n)
        .map(|i| {
            (0..1u32 << n)
                .filter(|row| row & (1 << i) != 0)
                .map(|row| (row, row & !(1 << i)))
                .filter(|&(a, b)| f(a) != f(b))
                .collect()
        })
        .collect();
    let mut best: Vec<BTreeSet<u32>> = Vec::new();
    let mut choice = vec![0usize; n];
    loop {
        let rows: BTreeSet<u32> = choice
            .iter()
            .enumerate()
            .flat_map(|(i, &c)| [pairs[i][c].0, pairs[i][c].1])
            .collect();
        match best.first().map(BTreeSet::len) {
            Some(len) if rows.len() > len => {}
            Some(len) if rows.len() == len => {
                if !best.contains(&rows) {
                    best.push(rows);
                }
            }
            _ => best = vec![rows],
        }
        // odometer over the pair choices
        let mut i = 0;
        loop {
            if i == n {
                return best;
            }
            choice[i] += 1;
            if choice[i] < pairs[i].len() {
                break;
            }
            choice[i] = 0;
            i += 1;
        }
    }
}

fn derived_rows(text: &str, n: usize, combinator: Combinator) -> (BTreeSet<u32>, usize) {
    let req = Requirement::new("R", RequirementKind::Functional, text);
    let conditional = extract(&req).unwrap();
    assert_eq!(conditional.causes.len(), n, "{text}");
    assert_eq!(conditional.combinator, combinator, "{text}");
    let graph = build_graph(&conditional);
    let cases = derive_tests(&graph, "R");
    let rows = cases
        .iter()
        .map(|c| {
            assert_eq!(
                graph.evaluate(&c.values()),
                c.expected.iter().map(|e| e.1).collect::<Vec<_>>()
            );
            c.values()
                .iter()
                .enumerate()
                .fold(0u32, |acc, (i, &v)| acc | (u32::from(v) << i))
        })
        .collect();
    (rows, cases.len())
}

#[test]
fn and_or_suites_match_the_truth_table_oracle() {
    let started = Instant::now();
    for n in 2..=6 {
        let all = (1u32 << n) - 1;
        for (connective, combinator, f) in [
            (
                "and",
                Combinator::And,
                Box::new(move |r: u32| r == all) as Box<dyn Fn(u32) -> bool>,
            ),
            ("or", Combinator::Or, Box::new(|r: u32| r != 0)),
        ] {
            let oracle = oracle_suites(n, f);
            assert_eq!(oracle.len(), 1, "minimal suite is unique for {connective} n={n}");
            assert_eq!(oracle[0].len(), n + 1);
            let (rows, count) = derived_rows(&sentence(n, connective), n, combinator);
            assert_eq!(count, n + 1, "{connective} n={n}");
            assert_eq!(rows, oracle[0], "{connective} n={n}");
        }
    }
    let (rows, count) = derived_rows(&sentence(1, "and"), 1, Combinator::Single);
    assert_eq!((rows, count), (oracle_suites(1, |r| r == 1)[0].clone(), 2));
    assert!(started.elapsed() < Duration::from_secs(10));
}

fn respace(text: &str, gaps: &[usize]) -> String {
    text.split(' ')
        .enumerate()
        .map(|(i, w)| format!("{w}{}", " ".repeat(1 + gaps.get(i).copied().unwrap_or(0))))
        .collect::<String>()
}

proptest! {
    #[test]
    fn classification_ignores_spacing_and_final_punctuation(
        pick in 0..7usize,
        gaps in prop::collection::vec(0..3usize, 0..40),
        ending in prop::sample::select(vec!["", ".", "!", " ."]),
    ) {
        let reqs = parse_requirements(walkthrough::REQUIREMENTS).unwrap();
        let req = &reqs[pick];
        let body = req.text.trim_end_matches('.');
        let variant = Requirement::new(&req.id, req.kind, format!("  {}{ending}", respace(body, &gaps)));
        prop_assert_eq!(classify(&variant), classify(req));
        if classify(req) == Causality::Causal {
            let count = |r: &Requirement| derive_tests(&build_graph(&extract(r).unwrap()), &r.id).len();
            prop_assert_eq!(count(&variant), count(req));
        }
    }
}
