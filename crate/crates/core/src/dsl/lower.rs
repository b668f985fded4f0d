//! Lowering of parsed scenarios onto engine programs.
//!
//! Each scenario body is flattened into a small instruction list. Guards become
//! conditional jumps over their bodies, so a body resumes by program counter
//! alone.

use std::collections::BTreeSet;
use std::sync::Arc;

use super::ast::*;
use super::expr::evaluate;
use super::pretty;
use crate::engine::{
    AssertionFailure, Bindings, Event, EventPattern, ObjectRef, ResumeContext, Scenario, ScenarioProgram, ScenarioRun,
    ScenarioScript, SenderPattern, Slot, SyncPoint,
};
use crate::value::{Timestamp, Value};

#[derive(Clone, Debug)]
pub enum Instr {
    Request(EventLiteral),
    Wait(PatternClause),
    /// Jump to the target when the condition is false.
    JumpIfFalse(Expr, usize),
    Assert(Expr, Option<String>),
}

#[derive(Clone, Debug)]
pub struct DslScript {
    pub instructions: Arc<[Instr]>,
}

impl DslScript {
    pub fn compile(steps: &[Step]) -> DslScript {
        let mut out = Vec::new();
        flatten(steps, &mut out);
        DslScript {
            instructions: out.into(),
        }
    }

    /// Request and wait instructions; guards do not add any.
    pub fn sync_instruction_count(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instr::Request(_) | Instr::Wait(_)))
            .count()
    }
}

fn flatten(steps: &[Step], out: &mut Vec<Instr>) {
    for step in steps {
        match step {
            Step::Request(e) => out.push(Instr::Request(e.clone())),
            Step::Wait(p) => out.push(Instr::Wait(p.clone())),
            Step::Assert { condition, message } => out.push(Instr::Assert(condition.clone(), message.clone())),
            Step::Guard { condition, body } => {
                let at = out.len();
                out.push(Instr::JumpIfFalse(condition.clone(), 0));
                flatten(body, out);
                let end = out.len();
                out[at] = Instr::JumpIfFalse(condition.clone(), end);
            }
        }
    }
}

impl ScenarioScript for DslScript {
    fn start(&self) -> Box<dyn ScenarioRun> {
        Box::new(DslRun {
            instructions: self.instructions.clone(),
            pc: 0,
        })
    }

    fn declared_objects(&self) -> Vec<ObjectRef> {
        let mut set = BTreeSet::new();
        for instr in self.instructions.iter() {
            match instr {
                Instr::Request(e) => {
                    set.insert(e.sender.clone());
                    set.insert(e.receiver.clone());
                }
                Instr::Wait(p) => {
                    set.extend(p.sender.clone());
                    set.insert(p.receiver.clone());
                }
                Instr::JumpIfFalse(..) | Instr::Assert(..) => {}
            }
        }
        set.into_iter().collect()
    }
}

struct DslRun {
    instructions: Arc<[Instr]>,
    pc: usize,
}

impl ScenarioRun for DslRun {
    fn resume(&mut self, ctx: &ResumeContext<'_>) -> Result<Option<SyncPoint>, AssertionFailure> {
        while let Some(instr) = self.instructions.get(self.pc) {
            self.pc += 1;
            match instr {
                Instr::Request(e) => return Ok(Some(SyncPoint::request(event(e, ctx.bindings, ctx.now)?))),
                Instr::Wait(p) => return Ok(Some(SyncPoint::wait(pattern(p, ctx.bindings, ctx.now)?))),
                Instr::JumpIfFalse(condition, target) => {
                    if !truth(condition, ctx.bindings, ctx.now)? {
                        self.pc = *target;
                    }
                }
                Instr::Assert(condition, message) => {
                    if !truth(condition, ctx.bindings, ctx.now)? {
                        let message = message
                            .clone()
                            .unwrap_or_else(|| format!("assertion failed: {}", pretty::expr(condition)));
                        return Err(AssertionFailure::new(message));
                    }
                }
            }
        }
        Ok(None)
    }
}

fn value(e: &Expr, bindings: &Bindings, now: Timestamp) -> Result<Value, AssertionFailure> {
    evaluate(e, bindings, now).map_err(AssertionFailure::new)
}

fn truth(e: &Expr, bindings: &Bindings, now: Timestamp) -> Result<bool, AssertionFailure> {
    let v = value(e, bindings, now)?;
    v.as_bool().ok_or_else(|| {
        AssertionFailure::new(format!(
            "condition `{}` evaluated to {} instead of a boolean",
            pretty::expr(e),
            v.kind()
        ))
    })
}

fn event(e: &EventLiteral, bindings: &Bindings, now: Timestamp) -> Result<Event, AssertionFailure> {
    Ok(Event {
        sender: e.sender.clone(),
        receiver: e.receiver.clone(),
        label: e.label.clone(),
        parameters: e
            .args
            .iter()
            .map(|a| value(a, bindings, now))
            .collect::<Result<_, _>>()?,
    })
}

fn pattern(p: &PatternClause, bindings: &Bindings, now: Timestamp) -> Result<EventPattern, AssertionFailure> {
    let mut names = p.into.iter();
    let slots = p
        .slots
        .iter()
        .map(|slot| match slot {
            SlotExpr::Check(e) => value(e, bindings, now).map(Slot::Bound),
            SlotExpr::Free => Ok(Slot::Free(names.next().cloned().unwrap_or_default())),
        })
        .collect::<Result<_, _>>()?;
    Ok(EventPattern {
        sender: p.sender.clone().map_or(SenderPattern::Any, SenderPattern::Exactly),
        receiver: p.receiver.clone(),
        label: p.label.clone(),
        slots,
    })
}

/// Trigger patterns are evaluated once, when lowering. The parser only admits
/// constant checks there.
fn trigger(p: &PatternClause) -> EventPattern {
    pattern(p, &Bindings::new(), Timestamp(0)).expect("trigger checks are constant")
}

/// Lowers the scenarios accepted by `keep` into one program named `id`.
/// Every object of the document is declared on the program.
pub fn lower_where(doc: &ScenarioDoc, id: &str, keep: impl Fn(&ScenarioDef) -> bool) -> ScenarioProgram {
    let mut program = ScenarioProgram::new(id);
    program.objects.extend(doc.objects.iter().cloned());
    for def in doc.scenarios.iter().filter(|d| keep(d)) {
        program = program.with_scenario(Scenario::new(
            def.id.clone(),
            def.trigger.as_ref().map(trigger),
            DslScript::compile(&def.steps),
        ));
    }
    program
}
