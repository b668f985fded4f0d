//! Static checking and evaluation of guard, assertion and argument
//! expressions.

use std::cmp::Ordering;

use super::ast::{BinaryOp, Expr, UnaryOp};
use crate::engine::Bindings;
use crate::value::{Timestamp, Value, ValueKind};

/// Statically known type of an expression. Bindings are `Unknown` because
/// they take whatever kind the matched event carried.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StaticType {
    Known(ValueKind),
    Duration,
    Unknown,
}

impl StaticType {
    fn is(self, kind: ValueKind) -> bool {
        matches!(self, StaticType::Known(k) if k == kind)
    }

    fn numeric_or_unknown(self) -> bool {
        matches!(
            self,
            StaticType::Unknown | StaticType::Known(ValueKind::Integer) | StaticType::Known(ValueKind::Decimal)
        )
    }

    fn boolean_or_unknown(self) -> bool {
        matches!(self, StaticType::Unknown | StaticType::Known(ValueKind::Boolean))
    }
}

impl std::fmt::Display for StaticType {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            StaticType::Known(k) => write!(f, "{k}"),
            StaticType::Duration => f.write_str("duration"),
            StaticType::Unknown => f.write_str("unknown"),
        }
    }
}

/// Infers the static type of `expr`, rejecting combinations that can never
/// evaluate.
pub fn check(expr: &Expr) -> Result<StaticType, String> {
    use StaticType::*;
    Ok(match expr {
        Expr::Literal(v) => Known(v.kind()),
        Expr::Duration { .. } => Duration,
        Expr::Now => Known(ValueKind::Timestamp),
        Expr::Name(_) => Unknown,
        Expr::Unary(UnaryOp::Not, e) => {
            let t = check(e)?;
            if !t.boolean_or_unknown() {
                return Err(format!("`not` needs a boolean operand, found {t}"));
            }
            Known(ValueKind::Boolean)
        }
        Expr::Unary(UnaryOp::Neg, e) => {
            let t = check(e)?;
            if !t.numeric_or_unknown() {
                return Err(format!("`-` needs a numeric operand, found {t}"));
            }
            t
        }
        Expr::Binary(op, l, r) => {
            let (lt, rt) = (check(l)?, check(r)?);
            match op {
                BinaryOp::And | BinaryOp::Or => {
                    if !lt.boolean_or_unknown() || !rt.boolean_or_unknown() {
                        return Err(format!("`{}` needs boolean operands, found {lt} and {rt}", op.symbol()));
                    }
                    Known(ValueKind::Boolean)
                }
                BinaryOp::Eq | BinaryOp::Ne => {
                    if lt == Duration || rt == Duration {
                        return Err("durations can only offset a timestamp".into());
                    }
                    Known(ValueKind::Boolean)
                }
                BinaryOp::Lt | BinaryOp::Le | BinaryOp::Gt | BinaryOp::Ge => {
                    let comparable = match (lt, rt) {
                        (Unknown, Duration) | (Duration, Unknown) | (Duration, Duration) => false,
                        (Unknown, _) | (_, Unknown) => true,
                        (a, b) if a.numeric_or_unknown() && b.numeric_or_unknown() => true,
                        (Known(a), Known(b)) => a == b && a != ValueKind::Boolean,
                        _ => false,
                    };
                    if !comparable {
                        return Err(format!("cannot order {lt} against {rt}"));
                    }
                    Known(ValueKind::Boolean)
                }
                BinaryOp::Add | BinaryOp::Sub => match (lt, rt) {
                    (t, Duration) if t.is(ValueKind::Timestamp) || t == Unknown => Known(ValueKind::Timestamp),
                    (Duration, _) | (_, Duration) => {
                        return Err("a duration can only be added to or subtracted from a timestamp".into())
                    }
                    (a, b) if a.numeric_or_unknown() && b.numeric_or_unknown() => arithmetic_type(a, b),
                    _ => return Err(format!("`{}` needs numeric operands, found {lt} and {rt}", op.symbol())),
                },
                BinaryOp::Mul | BinaryOp::Div => {
                    if !lt.numeric_or_unknown() || !rt.numeric_or_unknown() {
                        return Err(format!("`{}` needs numeric operands, found {lt} and {rt}", op.symbol()));
                    }
                    arithmetic_type(lt, rt)
                }
            }
        }
    })
}

fn arithmetic_type(a: StaticType, b: StaticType) -> StaticType {
    match (a, b) {
        (StaticType::Known(ValueKind::Integer), StaticType::Known(ValueKind::Integer)) => {
            StaticType::Known(ValueKind::Integer)
        }
        (StaticType::Unknown, _) | (_, StaticType::Unknown) => StaticType::Unknown,
        _ => StaticType::Known(ValueKind::Decimal),
    }
}

enum Evaluated {
    Value(Value),
    Duration(i64),
}

/// Evaluates `expr` against bindings with `now` fixed for the run.
pub fn evaluate(expr: &Expr, bindings: &Bindings, now: Timestamp) -> Result<Value, String> {
    match eval(expr, bindings, now)? {
        Evaluated::Value(v) => Ok(v),
        Evaluated::Duration(_) => Err("a duration is not a value".into()),
    }
}

fn eval(expr: &Expr, bindings: &Bindings, now: Timestamp) -> Result<Evaluated, String> {
    let value = |e: &Expr| evaluate(e, bindings, now);
    Ok(Evaluated::Value(match expr {
        Expr::Literal(v) => v.clone(),
        Expr::Duration { amount, unit } => {
            return amount
                .checked_mul(unit.millis())
                .map(Evaluated::Duration)
                .ok_or_else(|| "duration overflow".to_string())
        }
        Expr::Now => Value::Timestamp(now),
        Expr::Name(n) => bindings.get(n).cloned().ok_or_else(|| format!("unbound name `{n}`"))?,
        Expr::Unary(UnaryOp::Not, e) => Value::Boolean(!expect_bool(value(e)?)?),
        Expr::Unary(UnaryOp::Neg, e) => match value(e)? {
            Value::Integer(i) => Value::Integer(i.checked_neg().ok_or("integer overflow")?),
            Value::Decimal(d) => Value::Decimal(-d),
            other => return Err(format!("cannot negate {}", other.kind())),
        },
        Expr::Binary(BinaryOp::And, l, r) => Value::Boolean(expect_bool(value(l)?)? && expect_bool(value(r)?)?),
        Expr::Binary(BinaryOp::Or, l, r) => Value::Boolean(expect_bool(value(l)?)? || expect_bool(value(r)?)?),
        Expr::Binary(op @ (BinaryOp::Add | BinaryOp::Sub), l, r) => {
            let lhs = value(l)?;
            match (lhs, eval(r, bindings, now)?) {
                (Value::Timestamp(t), Evaluated::Duration(d)) => {
                    let offset = if *op == BinaryOp::Sub {
                        d.checked_neg().ok_or("duration overflow")?
                    } else {
                        d
                    };
                    Value::Timestamp(t.plus_millis(offset))
                }
                (_, Evaluated::Duration(_)) => return Err("durations only offset timestamps".into()),
                (lhs, Evaluated::Value(rhs)) => arithmetic(*op, lhs, rhs)?,
            }
        }
        Expr::Binary(op @ (BinaryOp::Mul | BinaryOp::Div), l, r) => arithmetic(*op, value(l)?, value(r)?)?,
        Expr::Binary(op, l, r) => {
            let (lhs, rhs) = (value(l)?, value(r)?);
            let result = match op {
                BinaryOp::Eq => lhs.loosely_equals(&rhs),
                BinaryOp::Ne => !lhs.loosely_equals(&rhs),
                _ => {
                    let ord = lhs
                        .compare(&rhs)
                        .ok_or_else(|| format!("cannot order {} against {}", lhs.kind(), rhs.kind()))?;
                    match op {
                        BinaryOp::Lt => ord == Ordering::Less,
                        BinaryOp::Le => ord != Ordering::Greater,
                        BinaryOp::Gt => ord == Ordering::Greater,
                        BinaryOp::Ge => ord != Ordering::Less,
                        _ => unreachable!(),
                    }
                }
            };
            Value::Boolean(result)
        }
    }))
}

fn expect_bool(v: Value) -> Result<bool, String> {
    v.as_bool()
        .ok_or_else(|| format!("expected boolean, found {}", v.kind()))
}

fn arithmetic(op: BinaryOp, lhs: Value, rhs: Value) -> Result<Value, String> {
    match (&lhs, &rhs) {
        (Value::Integer(a), Value::Integer(b)) => {
            let result = match op {
                BinaryOp::Add => a.checked_add(*b),
                BinaryOp::Sub => a.checked_sub(*b),
                BinaryOp::Mul => a.checked_mul(*b),
                BinaryOp::Div if *b == 0 => return Err("division by zero".into()),
                BinaryOp::Div => a.checked_div(*b),
                _ => unreachable!(),
            };
            result.map(Value::Integer).ok_or_else(|| "integer overflow".into())
        }
        _ => {
            let (Some(a), Some(b)) = (as_decimal(&lhs), as_decimal(&rhs)) else {
                return Err(format!(
                    "`{}` needs numbers, found {} and {}",
                    op.symbol(),
                    lhs.kind(),
                    rhs.kind()
                ));
            };
            Ok(Value::Decimal(match op {
                BinaryOp::Add => a + b,
                BinaryOp::Sub => a - b,
                BinaryOp::Mul => a * b,
                BinaryOp::Div => a / b,
                _ => unreachable!(),
            }))
        }
    }
}

fn as_decimal(v: &Value) -> Option<f64> {
    match v {
        Value::Integer(i) => Some(*i as f64),
        Value::Decimal(d) => Some(*d),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dsl::ast::DurationUnit;

    fn name(n: &str) -> Expr {
        Expr::Name(n.into())
    }

    fn lit(v: impl Into<Value>) -> Expr {
        Expr::Literal(v.into())
    }

    #[test]
    fn timer_charging_guard_evaluates() {
        // activateTimerCharging and destinationSOC > 0 and departureTime > now
        let guard = Expr::binary(
            BinaryOp::And,
            Expr::binary(
                BinaryOp::And,
                name("activate"),
                Expr::binary(BinaryOp::Gt, name("soc"), lit(0i64)),
            ),
            Expr::binary(BinaryOp::Gt, name("departure"), Expr::Now),
        );
        let now = Timestamp(10_000);
        let mut b = Bindings::new();
        b.insert("activate".into(), Value::Boolean(true));
        b.insert("soc".into(), Value::Integer(100));
        b.insert("departure".into(), Value::Timestamp(now.plus_hours(6)));
        assert_eq!(evaluate(&guard, &b, now), Ok(Value::Boolean(true)));
        b.insert("soc".into(), Value::Integer(0));
        assert_eq!(evaluate(&guard, &b, now), Ok(Value::Boolean(false)));
        assert_eq!(check(&guard), Ok(StaticType::Known(ValueKind::Boolean)));
    }

    #[test]
    fn now_plus_hours() {
        let e = Expr::binary(
            BinaryOp::Add,
            Expr::Now,
            Expr::Duration {
                amount: 6,
                unit: DurationUnit::Hours,
            },
        );
        let now = Timestamp(0);
        assert_eq!(
            evaluate(&e, &Bindings::new(), now),
            Ok(Value::Timestamp(now.plus_hours(6)))
        );
    }

    #[test]
    fn static_errors() {
        assert!(check(&Expr::binary(BinaryOp::And, lit(1i64), lit(true))).is_err());
        assert!(check(&Expr::binary(BinaryOp::Add, lit(true), lit(1i64))).is_err());
        assert!(check(&Expr::binary(
            BinaryOp::Add,
            lit(1i64),
            Expr::Duration {
                amount: 1,
                unit: DurationUnit::Hours
            }
        ))
        .is_err());
        assert!(check(&Expr::binary(BinaryOp::Lt, lit("a"), lit(1i64))).is_err());
        assert!(check(&Expr::binary(BinaryOp::Lt, name("x"), lit(1i64))).is_ok());
    }

    #[test]
    fn mixed_kind_equality_is_false_not_an_error() {
        let e = Expr::binary(BinaryOp::Eq, lit(100i64), Expr::Now);
        assert_eq!(evaluate(&e, &Bindings::new(), Timestamp(0)), Ok(Value::Boolean(false)));
    }

    #[test]
    fn runtime_errors() {
        let b = Bindings::new();
        assert!(evaluate(&name("x"), &b, Timestamp(0)).is_err());
        assert!(evaluate(&Expr::binary(BinaryOp::Div, lit(1i64), lit(0i64)), &b, Timestamp(0)).is_err());
        assert_eq!(
            evaluate(&Expr::binary(BinaryOp::Div, lit(7i64), lit(2i64)), &b, Timestamp(0)),
            Ok(Value::Integer(3))
        );
        assert_eq!(
            evaluate(&Expr::binary(BinaryOp::Mul, lit(1.5), lit(2i64)), &b, Timestamp(0)),
            Ok(Value::Decimal(3.0))
        );
    }
}
