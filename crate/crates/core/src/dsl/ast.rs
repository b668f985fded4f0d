use crate::engine::ObjectRef;
use crate::value::Value;

/// A parsed `.scn` file.
#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioDoc {
    pub program: String,
    pub objects: Vec<ObjectRef>,
    pub scenarios: Vec<ScenarioDef>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ScenarioKind {
    Spec,
    Test,
}

impl ScenarioKind {
    pub fn keyword(self) -> &'static str {
        match self {
            ScenarioKind::Spec => "spec",
            ScenarioKind::Test => "test",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScenarioDef {
    pub id: String,
    pub kind: ScenarioKind,
    pub trigger: Option<PatternClause>,
    pub steps: Vec<Step>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum Step {
    Request(EventLiteral),
    Wait(PatternClause),
    Guard { condition: Expr, body: Vec<Step> },
    Assert { condition: Expr, message: Option<String> },
}

impl Step {
    /// Request and wait steps in this step and everything nested under it.
    pub fn sync_step_count(&self) -> usize {
        match self {
            Step::Request(_) | Step::Wait(_) => 1,
            Step::Guard { body, .. } => body.iter().map(Step::sync_step_count).sum(),
            Step::Assert { .. } => 0,
        }
    }
}

/// `sender -> receiver.label(args)`, arguments evaluated when the step is reached.
#[derive(Clone, Debug, PartialEq)]
pub struct EventLiteral {
    pub sender: ObjectRef,
    pub receiver: ObjectRef,
    pub label: String,
    pub args: Vec<Expr>,
}

#[derive(Clone, Debug, PartialEq)]
pub enum SlotExpr {
    /// Must equal the evaluated expression.
    Check(Expr),
    /// Binds the next name of the `into` list.
    Free,
}

/// `sender|* -> receiver.label(slots) into names`.
#[derive(Clone, Debug, PartialEq)]
pub struct PatternClause {
    /// `None` is the `*` wildcard.
    pub sender: Option<ObjectRef>,
    pub receiver: ObjectRef,
    pub label: String,
    pub slots: Vec<SlotExpr>,
    /// One name per free slot, in slot order.
    pub into: Vec<String>,
}

impl PatternClause {
    pub fn all_free(&self) -> bool {
        self.slots.iter().all(|s| matches!(s, SlotExpr::Free))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum DurationUnit {
    Hours,
    Minutes,
    Seconds,
    Millis,
}

impl DurationUnit {
    pub fn suffix(self) -> &'static str {
        match self {
            DurationUnit::Hours => "h",
            DurationUnit::Minutes => "m",
            DurationUnit::Seconds => "s",
            DurationUnit::Millis => "ms",
        }
    }

    pub fn millis(self) -> i64 {
        match self {
            DurationUnit::Hours => crate::value::MILLIS_PER_HOUR,
            DurationUnit::Minutes => crate::value::MILLIS_PER_MINUTE,
            DurationUnit::Seconds => crate::value::MILLIS_PER_SECOND,
            DurationUnit::Millis => 1,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UnaryOp {
    Not,
    Neg,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum BinaryOp {
    Or,
    And,
    Eq,
    Ne,
    Lt,
    Le,
    Gt,
    Ge,
    Add,
    Sub,
    Mul,
    Div,
}

impl BinaryOp {
    pub fn symbol(self) -> &'static str {
        match self {
            BinaryOp::Or => "or",
            BinaryOp::And => "and",
            BinaryOp::Eq => "==",
            BinaryOp::Ne => "!=",
            BinaryOp::Lt => "<",
            BinaryOp::Le => "<=",
            BinaryOp::Gt => ">",
            BinaryOp::Ge => ">=",
            BinaryOp::Add => "+",
            BinaryOp::Sub => "-",
            BinaryOp::Mul => "*",
            BinaryOp::Div => "/",
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Expr {
    Literal(Value),
    /// A time span such as `6h`; only valid as a timestamp offset.
    Duration {
        amount: i64,
        unit: DurationUnit,
    },
    Now,
    Name(String),
    Unary(UnaryOp, Box<Expr>),
    Binary(BinaryOp, Box<Expr>, Box<Expr>),
}

impl Expr {
    pub fn binary(op: BinaryOp, lhs: Expr, rhs: Expr) -> Expr {
        Expr::Binary(op, Box::new(lhs), Box::new(rhs))
    }

    pub fn names(&self) -> Vec<&str> {
        let mut out = Vec::new();
        self.collect_names(&mut out);
        out
    }

    fn collect_names<'a>(&'a self, out: &mut Vec<&'a str>) {
        match self {
            Expr::Name(n) => out.push(n),
            Expr::Unary(_, e) => e.collect_names(out),
            Expr::Binary(_, l, r) => {
                l.collect_names(out);
                r.collect_names(out);
            }
            Expr::Literal(_) | Expr::Duration { .. } | Expr::Now => {}
        }
    }
}
