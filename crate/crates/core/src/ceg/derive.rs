use std::collections::BTreeSet;
use std::fmt::Write;

use super::{CauseEffectGraph, Requirement};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DerivedTestCase {
    pub requirement_id: String,
    /// 1-based position in the suite.
    pub case_index: usize,
    /// Every cause with its value, in cause order.
    pub assignment: Vec<(String, bool)>,
    /// Every effect with its expected value, in effect order.
    pub expected: Vec<(String, bool)>,
}

impl DerivedTestCase {
    /// `<requirement>.<index>`, e.g. `TM_710.1`.
    pub fn id(&self) -> String {
        format!("{}.{}", self.requirement_id, self.case_index)
    }

    pub fn values(&self) -> Vec<bool> {
        self.assignment.iter().map(|(_, v)| *v).collect()
    }

    /// True when at least one effect is expected to occur.
    pub fn is_positive(&self) -> bool {
        self.expected.iter().any(|(_, v)| *v)
    }
}

/// Bit `i` of `row` is the value of cause `i`.
fn assignment(row: u64, n: usize) -> Vec<bool> {
    (0..n).map(|i| row >> i & 1 == 1).collect()
}

/// Unique-cause MC/DC suite. For each cause in order an independence pair
/// (two rows differing only in that cause, with different effects) is added,
/// preferring the pair that adds the fewest new rows and, among those, the
/// first in row order. Rows where some effect occurs come first; otherwise
/// rows keep the order in which they were added.
///
/// Enumerates the full truth table, so it is meant for sentence-sized
/// graphs (a handful of causes).
pub fn derive_tests(graph: &CauseEffectGraph, requirement_id: &str) -> Vec<DerivedTestCase> {
    let n = graph.causes.len();
    assert!(n < 24, "truth-table derivation supports fewer than 24 causes");
    let rows = 1u64 << n;
    let outcomes: Vec<Vec<bool>> = (0..rows).map(|r| graph.evaluate(&assignment(r, n))).collect();

    let mut chosen: Vec<u64> = Vec::new();
    let mut seen = BTreeSet::new();
    for cause in 0..n {
        let bit = 1u64 << cause;
        let best = (0..rows)
            .filter(|r| r & bit != 0)
            .filter(|&r| outcomes[r as usize] != outcomes[(r ^ bit) as usize])
            .map(|r| {
                let added = [r, r ^ bit].iter().filter(|x| !seen.contains(*x)).count();
                (added, r)
            })
            .min_by_key(|&(added, r)| (added, r));
        let Some((_, row)) = best else { continue };
        let mut pair = [row, row ^ bit];
        // The row with the stronger effect is recorded first.
        if outcomes[pair[1] as usize].iter().filter(|v| **v).count()
            > outcomes[pair[0] as usize].iter().filter(|v| **v).count()
        {
            pair.swap(0, 1);
        }
        for r in pair {
            if seen.insert(r) {
                chosen.push(r);
            }
        }
    }
    if chosen.is_empty() {
        chosen.push(rows - 1);
    }
    let positive = |r: &u64| outcomes[*r as usize].iter().any(|v| *v);
    let mut ordered: Vec<u64> = chosen.iter().copied().filter(positive).collect();
    ordered.extend(chosen.iter().copied().filter(|r| !positive(r)));

    ordered
        .into_iter()
        .enumerate()
        .map(|(i, row)| DerivedTestCase {
            requirement_id: requirement_id.to_string(),
            case_index: i + 1,
            assignment: graph.causes.iter().cloned().zip(assignment(row, n)).collect(),
            expected: graph
                .effects
                .iter()
                .cloned()
                .zip(outcomes[row as usize].iter().copied())
                .collect(),
        })
        .collect()
}

/// One `test` scenario stub per case, without a `program` header. Causes and
/// expectations become comments; the placeholder assertion keeps the stub red
/// until the case is modeled.
pub fn emit_test_skeletons(cases: &[DerivedTestCase], req: &Requirement) -> String {
    let mut out = String::new();
    for (n, case) in cases.iter().enumerate() {
        if n > 0 {
            out.push('\n');
        }
        let id = case.id();
        let _ = writeln!(out, "# {}: {}", req.id, req.text);
        let _ = writeln!(out, "scenario {id} test");
        for (cause, value) in &case.assignment {
            let _ = writeln!(out, "  # cause {value}: {cause}");
        }
        for (effect, value) in &case.expected {
            let _ = writeln!(out, "  # expect {value}: {effect}");
        }
        if !case.is_positive() {
            let _ = writeln!(out, "  # negative case: check that the effect event stays absent");
        }
        let _ = writeln!(out, "  assert false, \"not modeled yet\"");
    }
    out
}
