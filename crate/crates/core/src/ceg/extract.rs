//! Rule-based detection and extraction of conditionals.
//!
//! A sentence is causal when it contains a cue (`if`, `when`, `after`,
//! `in case`, `unless`, `triggered by`) that separates an antecedent from a
//! consequent. A leading cue puts the antecedent before the first comma (or
//! before `then`); a cue inside the sentence puts the consequent in front of
//! it. Quoted text is never split.

use super::{Cause, CegError, Combinator, Conditional, ConditionalDetector, Effect};

const CUES: &[&str] = &["in case", "triggered by", "unless", "after", "when", "if"];
const MODALS: &[&str] = &["shall", "must", "will", "should", "has to", "have to"];
const NEGATIONS: &[&str] = &["not", "no", "never"];

/// How causes combine; leaves index into [`Conditional::causes`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CauseTree {
    Leaf(usize),
    And(Vec<CauseTree>),
    Or(Vec<CauseTree>),
}

impl CauseTree {
    /// Truth of the tree for raw cause values, honouring negated causes.
    pub fn evaluate(&self, causes: &[Cause], values: &[bool]) -> bool {
        match self {
            CauseTree::Leaf(i) => values[*i] != causes[*i].negated,
            CauseTree::And(children) => children.iter().all(|c| c.evaluate(causes, values)),
            CauseTree::Or(children) => children.iter().any(|c| c.evaluate(causes, values)),
        }
    }

    fn de_morgan(self) -> CauseTree {
        match self {
            CauseTree::Leaf(i) => CauseTree::Leaf(i),
            CauseTree::And(c) => CauseTree::Or(c.into_iter().map(CauseTree::de_morgan).collect()),
            CauseTree::Or(c) => CauseTree::And(c.into_iter().map(CauseTree::de_morgan).collect()),
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct RuleBasedDetector;

impl ConditionalDetector for RuleBasedDetector {
    fn extract(&self, text: &str) -> Result<Conditional, CegError> {
        let sentence = normalize(text);
        let lower = sentence.to_ascii_lowercase();
        let quoted = quote_mask(&sentence);
        let Some((at, cue)) = find_word(&lower, &quoted, CUES, 0) else {
            return Err(CegError::NotCausal(text.to_string()));
        };

        let (antecedent, consequent) = if at == 0 {
            let rest_start = if cue == "triggered by" { 0 } else { cue.len() };
            let split = find_char(&sentence, &quoted, ',', rest_start)
                .map(|comma| (comma, comma + 1))
                .or_else(|| find_word(&lower, &quoted, &["then"], rest_start).map(|(t, _)| (t, t + 4)));
            let Some((end, resume)) = split else {
                return Err(CegError::NoConsequent(text.to_string()));
            };
            let consequent = sentence[resume..].trim();
            let consequent = strip_prefix_word(consequent, "then");
            ((rest_start, end), consequent.to_string())
        } else {
            let start = if cue == "triggered by" { at } else { at + cue.len() };
            let consequent = sentence[..at].trim().trim_end_matches(',').trim_end();
            ((start, sentence.len()), consequent.to_string())
        };
        if consequent.is_empty() {
            return Err(CegError::NoConsequent(text.to_string()));
        }

        let (ante_start, ante_end) = antecedent;
        let groups = split_causes(&sentence, &lower, &quoted, ante_start, ante_end);
        if groups.iter().flatten().any(|p| p.is_empty()) || groups.is_empty() {
            return Err(CegError::NoAntecedent(text.to_string()));
        }

        let unless = cue == "unless";
        let mut causes = Vec::new();
        let mut tree_groups = Vec::new();
        for group in groups {
            let mut leaves = Vec::new();
            for phrase in group {
                leaves.push(CauseTree::Leaf(causes.len()));
                causes.push(Cause {
                    negated: mentions_negation(&phrase) != unless,
                    phrase,
                });
            }
            tree_groups.push(if leaves.len() == 1 {
                leaves.remove(0)
            } else {
                CauseTree::And(leaves)
            });
        }
        let mut tree = if tree_groups.len() == 1 {
            tree_groups.remove(0)
        } else {
            CauseTree::Or(tree_groups)
        };
        if unless {
            tree = tree.de_morgan();
        }
        let combinator = combinator_of(&tree);

        let effects = split_effects(&consequent)
            .into_iter()
            .map(|phrase| Effect { phrase })
            .collect();
        Ok(Conditional {
            causes,
            combinator,
            tree,
            effects,
        })
    }
}

fn combinator_of(tree: &CauseTree) -> Combinator {
    let flat = |children: &[CauseTree]| children.iter().all(|c| matches!(c, CauseTree::Leaf(_)));
    match tree {
        CauseTree::Leaf(_) => Combinator::Single,
        CauseTree::And(c) if flat(c) => Combinator::And,
        CauseTree::Or(c) if flat(c) => Combinator::Or,
        _ => Combinator::Mixed,
    }
}

/// Trims whitespace and sentence-final punctuation.
fn normalize(text: &str) -> String {
    text.trim()
        .trim_end_matches(['.', '!', '?', ';', ':'])
        .trim_end()
        .to_string()
}

/// `mask[i]` is true for bytes inside a double-quoted span.
fn quote_mask(s: &str) -> Vec<bool> {
    let mut inside = false;
    s.bytes()
        .map(|b| {
            if b == b'"' {
                inside = !inside;
                true
            } else {
                inside
            }
        })
        .collect()
}

fn is_word_byte(b: u8) -> bool {
    b.is_ascii_alphanumeric() || b == b'_' || b >= 0x80
}

/// Earliest whole-word occurrence of any of `words` at or after `from`,
/// outside quotes.
fn find_word<'w>(lower: &str, quoted: &[bool], words: &[&'w str], from: usize) -> Option<(usize, &'w str)> {
    let bytes = lower.as_bytes();
    (from..lower.len())
        .filter(|&i| !quoted[i] && (i == 0 || !is_word_byte(bytes[i - 1])))
        .find_map(|i| {
            words.iter().find_map(|w| {
                let end = i + w.len();
                (bytes[i..].starts_with(w.as_bytes()) && (end == bytes.len() || !is_word_byte(bytes[end])))
                    .then_some((i, *w))
            })
        })
}

fn find_char(s: &str, quoted: &[bool], c: char, from: usize) -> Option<usize> {
    s.char_indices()
        .find(|&(i, ch)| i >= from && ch == c && !quoted[i])
        .map(|(i, _)| i)
}

fn strip_prefix_word<'a>(s: &'a str, word: &str) -> &'a str {
    match s.get(..word.len()) {
        Some(head)
            if head.eq_ignore_ascii_case(word)
                && s.as_bytes().get(word.len()).is_some_and(|b| b.is_ascii_whitespace()) =>
        {
            s[word.len()..].trim_start()
        }
        _ => s,
    }
}

fn clean(phrase: &str) -> String {
    phrase.trim().trim_matches(',').trim().to_string()
}

/// Splits `sentence[start..end]` on `or` into groups and each group on `and`.
fn split_causes(sentence: &str, lower: &str, quoted: &[bool], start: usize, end: usize) -> Vec<Vec<String>> {
    let mut groups = vec![Vec::new()];
    let mut piece_start = start;
    let mut cursor = start;
    while let Some((at, word)) = find_word(&lower[..end], quoted, &["and", "or"], cursor) {
        groups
            .last_mut()
            .expect("never empty")
            .push(clean(&sentence[piece_start..at]));
        if word == "or" {
            groups.push(Vec::new());
        }
        piece_start = at + word.len();
        cursor = piece_start;
    }
    groups
        .last_mut()
        .expect("never empty")
        .push(clean(&sentence[piece_start..end]));
    groups
}

/// Splits on `and` only where the next part carries its own modal verb.
fn split_effects(consequent: &str) -> Vec<String> {
    let lower = consequent.to_ascii_lowercase();
    let quoted = quote_mask(consequent);
    let mut cuts = Vec::new();
    let mut cursor = 0;
    while let Some((at, _)) = find_word(&lower, &quoted, &["and"], cursor) {
        cuts.push(at);
        cursor = at + 3;
    }
    let mut effects = Vec::new();
    let mut start = 0;
    for (n, &cut) in cuts.iter().enumerate() {
        let next_end = cuts.get(n + 1).copied().unwrap_or(consequent.len());
        let next = &lower[cut + 3..next_end];
        let has_modal = find_word(next, &quote_mask(next), MODALS, 0).is_some();
        if has_modal && !consequent[start..cut].trim().is_empty() {
            effects.push(clean(&consequent[start..cut]));
            start = cut + 3;
        }
    }
    effects.push(clean(&consequent[start..]));
    effects
}

fn mentions_negation(phrase: &str) -> bool {
    let lower = phrase.to_ascii_lowercase();
    find_word(&lower, &quote_mask(&lower), NEGATIONS, 0).is_some() || lower.contains("n't ")
}
