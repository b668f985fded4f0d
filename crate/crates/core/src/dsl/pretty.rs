use std::fmt::Write;

use super::ast::*;
use crate::value::Value;

/// Canonical source text for `doc`; parsing it yields an equal document.
pub fn print(doc: &ScenarioDoc) -> String {
    let mut out = format!("program {}\n", doc.program);
    for object in &doc.objects {
        let _ = writeln!(out, "object {object}");
    }
    for scenario in &doc.scenarios {
        let _ = write!(out, "\nscenario {} {}\n", scenario.id, scenario.kind.keyword());
        if let Some(trigger) = &scenario.trigger {
            let _ = writeln!(out, "  when {}", pattern(trigger));
        }
        steps(&mut out, &scenario.steps, 1);
    }
    out
}

fn steps(out: &mut String, steps: &[Step], depth: usize) {
    let indent = "  ".repeat(depth);
    for step in steps {
        match step {
            Step::Request(e) => {
                let _ = writeln!(out, "{indent}request {}", event(e));
            }
            Step::Wait(p) => {
                let _ = writeln!(out, "{indent}wait {}", pattern(p));
            }
            Step::Guard { condition, body } => {
                let _ = writeln!(out, "{indent}if {}", expr(condition));
                self::steps(out, body, depth + 1);
            }
            Step::Assert { condition, message } => {
                let _ = write!(out, "{indent}assert {}", expr(condition));
                if let Some(m) = message {
                    out.push_str(", ");
                    let _ = crate::value::write_quoted(out, m);
                }
                out.push('\n');
            }
        }
    }
}

fn event(e: &EventLiteral) -> String {
    let args: Vec<String> = e.args.iter().map(expr).collect();
    format!("{} -> {}.{}({})", e.sender, e.receiver, e.label, args.join(", "))
}

pub(crate) fn pattern(p: &PatternClause) -> String {
    let sender = p.sender.as_ref().map_or("*".to_string(), ToString::to_string);
    let mut s = format!("{sender} -> {}.{}", p.receiver, p.label);
    if !(p.all_free() && !p.into.is_empty()) {
        let slots: Vec<String> = p
            .slots
            .iter()
            .map(|slot| match slot {
                SlotExpr::Free => "?".to_string(),
                SlotExpr::Check(e) => expr(e),
            })
            .collect();
        let _ = write!(s, "({})", slots.join(", "));
    }
    if !p.into.is_empty() {
        let _ = write!(s, " into {}", p.into.join(", "));
    }
    s
}

pub fn expr(e: &Expr) -> String {
    match e {
        Expr::Literal(v) => v.to_string(),
        Expr::Duration { amount, unit } => format!("{amount}{}", unit.suffix()),
        Expr::Now => "now".into(),
        Expr::Name(n) => n.clone(),
        Expr::Unary(UnaryOp::Not, inner) => format!("not {}", operand(inner)),
        Expr::Unary(UnaryOp::Neg, inner) => format!("-({})", expr(inner)),
        Expr::Binary(op, l, r) => format!("{} {} {}", operand(l), op.symbol(), operand(r)),
    }
}

fn operand(e: &Expr) -> String {
    match e {
        Expr::Binary(..) | Expr::Unary(UnaryOp::Not, _) => format!("({})", expr(e)),
        Expr::Literal(v) if is_negative(v) => format!("({v})"),
        _ => expr(e),
    }
}

fn is_negative(v: &Value) -> bool {
    match v {
        Value::Integer(i) => *i < 0,
        Value::Decimal(d) => d.is_sign_negative(),
        _ => false,
    }
}
