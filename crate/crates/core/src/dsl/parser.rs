use std::collections::{BTreeSet, HashSet};

use super::ast::*;
use super::expr;
use super::lexer::{tokenize, Spanned, Tok};
use super::Diagnostic;
use crate::engine::ObjectRef;
use crate::value::Value;

const RESERVED: &[&str] = &["and", "or", "not", "true", "false", "now", "into"];

struct Line<'a> {
    number: usize,
    indent: usize,
    content: &'a str,
}

/// Parses a whole document; returns every diagnostic found, never a partial
/// document.
pub fn parse(text: &str) -> Result<ScenarioDoc, Vec<Diagnostic>> {
    let mut diags = Vec::new();
    let mut lines = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let number = i + 1;
        let trimmed = raw.trim_start_matches(' ');
        if trimmed.trim().is_empty() || trimmed.trim_start().starts_with('#') {
            continue;
        }
        if trimmed.starts_with('\t') {
            diags.push(Diagnostic::new(
                number,
                raw.len() - trimmed.len() + 1,
                "tabs are not allowed for indentation",
            ));
            continue;
        }
        lines.push(Line {
            number,
            indent: raw.len() - trimmed.len(),
            content: trimmed.trim_end(),
        });
    }

    // Objects first, so scenarios may reference objects declared later.
    let mut program: Option<String> = None;
    let mut objects: Vec<ObjectRef> = Vec::new();
    let mut object_set = BTreeSet::new();
    for line in lines.iter().filter(|l| l.indent == 0) {
        let (keyword, rest) = split_keyword(line.content);
        let rest_column = line.content.len() - rest.len() + 1;
        match keyword {
            "program" => {
                if program.is_some() {
                    diags.push(Diagnostic::new(line.number, 1, "program declared twice"));
                } else if !is_scenario_id(rest) {
                    diags.push(Diagnostic::new(
                        line.number,
                        rest_column,
                        format!("invalid program id `{rest}`"),
                    ));
                } else {
                    program = Some(rest.to_string());
                }
            }
            "object" => match ObjectRef::parse(rest).filter(|_| rest.split('.').all(is_identifier)) {
                Some(object) => {
                    if object_set.insert(object.clone()) {
                        objects.push(object);
                    } else {
                        diags.push(Diagnostic::new(
                            line.number,
                            rest_column,
                            format!("object `{rest}` declared twice"),
                        ));
                    }
                }
                None => diags.push(Diagnostic::new(
                    line.number,
                    rest_column,
                    format!("invalid object path `{rest}`"),
                )),
            },
            _ => {}
        }
    }

    let mut scenarios = Vec::new();
    let mut scenario_ids = HashSet::new();
    let mut i = 0;
    while i < lines.len() {
        let line = &lines[i];
        if line.indent > 0 {
            diags.push(Diagnostic::new(
                line.number,
                line.indent + 1,
                "step outside of a scenario",
            ));
            i += 1;
            continue;
        }
        let (keyword, rest) = split_keyword(line.content);
        match keyword {
            "program" | "object" => i += 1,
            "scenario" => {
                let header_line = line.number;
                let body_start = i + 1;
                let mut body_end = body_start;
                while body_end < lines.len() && lines[body_end].indent > 0 {
                    body_end += 1;
                }
                let header = parse_scenario_header(rest, line.content.len() - rest.len() + 1, header_line);
                let mut parser = ScenarioParser {
                    objects: &object_set,
                    diags: &mut diags,
                };
                let body = &lines[body_start..body_end];
                match header {
                    Ok((id, kind)) => {
                        if !scenario_ids.insert(id.clone()) {
                            parser.diags.push(Diagnostic::new(
                                header_line,
                                line.content.len() - rest.len() + 1,
                                format!("duplicate scenario id `{id}`"),
                            ));
                        }
                        if let Some(def) = parser.scenario(id, kind, body) {
                            scenarios.push(def);
                        }
                    }
                    Err(d) => diags.push(d),
                }
                i = body_end;
            }
            other => {
                diags.push(Diagnostic::new(
                    line.number,
                    1,
                    format!("unknown declaration `{other}`"),
                ));
                i += 1;
            }
        }
    }

    if program.is_none() {
        diags.push(Diagnostic::new(1, 1, "no program declared"));
    }
    if diags.is_empty() {
        Ok(ScenarioDoc {
            program: program.unwrap_or_default(),
            objects,
            scenarios,
        })
    } else {
        diags.sort_by_key(|d| (d.line, d.column));
        Err(diags)
    }
}

/// Trigger checks are evaluated once, before any run, so they must be
/// constant and must evaluate.
fn trigger_problem(pattern: &PatternClause) -> Option<String> {
    fn mentions_now(e: &Expr) -> bool {
        match e {
            Expr::Now => true,
            Expr::Unary(_, inner) => mentions_now(inner),
            Expr::Binary(_, l, r) => mentions_now(l) || mentions_now(r),
            Expr::Literal(_) | Expr::Duration { .. } | Expr::Name(_) => false,
        }
    }
    pattern.slots.iter().find_map(|slot| match slot {
        SlotExpr::Check(e) if mentions_now(e) => Some("trigger arguments cannot depend on `now`".to_string()),
        SlotExpr::Check(e) => expr::evaluate(e, &Default::default(), crate::value::Timestamp(0)).err(),
        SlotExpr::Free => None,
    })
}

fn split_keyword(content: &str) -> (&str, &str) {
    match content.split_once(char::is_whitespace) {
        Some((k, rest)) => (k, rest.trim()),
        None => (content, ""),
    }
}

pub(crate) fn is_identifier(s: &str) -> bool {
    let mut chars = s.chars();
    chars.next().is_some_and(|c| c.is_alphabetic() || c == '_') && chars.all(|c| c.is_alphanumeric() || c == '_')
}

pub(crate) fn is_scenario_id(s: &str) -> bool {
    !s.is_empty()
        && s.chars().all(|c| c.is_alphanumeric() || matches!(c, '_' | '.' | '-'))
        && !s.starts_with(['.', '-'])
}

fn parse_scenario_header(rest: &str, column: usize, line: usize) -> Result<(String, ScenarioKind), Diagnostic> {
    let parts: Vec<&str> = rest.split_whitespace().collect();
    let [id, kind] = parts.as_slice() else {
        return Err(Diagnostic::new(line, column, "expected `scenario <id> spec|test`"));
    };
    if !is_scenario_id(id) {
        return Err(Diagnostic::new(line, column, format!("invalid scenario id `{id}`")));
    }
    let kind = match *kind {
        "spec" => ScenarioKind::Spec,
        "test" => ScenarioKind::Test,
        other => {
            return Err(Diagnostic::new(
                line,
                column + id.len() + 1,
                format!("scenario kind must be `spec` or `test`, found `{other}`"),
            ))
        }
    };
    Ok((id.to_string(), kind))
}

struct ScenarioParser<'a> {
    objects: &'a BTreeSet<ObjectRef>,
    diags: &'a mut Vec<Diagnostic>,
}

impl ScenarioParser<'_> {
    fn scenario(&mut self, id: String, kind: ScenarioKind, body: &[Line<'_>]) -> Option<ScenarioDef> {
        let errors_before = self.diags.len();
        let mut scope: Vec<String> = Vec::new();
        let mut rest = body;
        let mut trigger = None;
        if let Some(first) = body.first() {
            let (keyword, _) = split_keyword(first.content);
            if keyword == "when" {
                if kind == ScenarioKind::Test {
                    self.diags.push(Diagnostic::new(
                        first.number,
                        first.indent + 1,
                        "test scenarios cannot have a trigger",
                    ));
                }
                if let Some(tokens) = self.tokens(first, "when") {
                    let mut cursor = Cursor::new(&tokens, first.number, first.indent + first.content.len() + 1);
                    match self.pattern(&mut cursor, &scope) {
                        Ok(p) if trigger_problem(&p).is_some() => self.diags.push(Diagnostic::new(
                            first.number,
                            first.indent + 1,
                            trigger_problem(&p).unwrap_or_default(),
                        )),
                        Ok(p) => {
                            self.bind_all(&mut scope, &p.into, first);
                            trigger = Some(p);
                        }
                        Err(d) => self.diags.push(d),
                    }
                }
                rest = &body[1..];
            }
        }
        let steps = match rest.first() {
            Some(first) => {
                let mut index = 0;
                let steps = self.block(rest, &mut index, first.indent, &mut scope);
                if index < rest.len() {
                    let stray = &rest[index];
                    self.diags.push(Diagnostic::new(
                        stray.number,
                        stray.indent + 1,
                        "inconsistent indentation",
                    ));
                }
                steps
            }
            None => Vec::new(),
        };
        (self.diags.len() == errors_before).then_some(ScenarioDef {
            id,
            kind,
            trigger,
            steps,
        })
    }

    fn block(&mut self, lines: &[Line<'_>], index: &mut usize, indent: usize, scope: &mut Vec<String>) -> Vec<Step> {
        let mut steps = Vec::new();
        while *index < lines.len() {
            let line = &lines[*index];
            if line.indent < indent {
                break;
            }
            if line.indent > indent {
                self.diags
                    .push(Diagnostic::new(line.number, line.indent + 1, "unexpected indentation"));
                *index += 1;
                continue;
            }
            *index += 1;
            let (keyword, _) = split_keyword(line.content);
            let end_column = line.indent + line.content.len() + 1;
            match keyword {
                "request" => {
                    if let Some(tokens) = self.tokens(line, "request") {
                        let mut cursor = Cursor::new(&tokens, line.number, end_column);
                        match self.event(&mut cursor, scope).and_then(|e| cursor.finish().map(|_| e)) {
                            Ok(e) => steps.push(Step::Request(e)),
                            Err(d) => self.diags.push(d),
                        }
                    }
                }
                "wait" => {
                    if let Some(tokens) = self.tokens(line, "wait") {
                        let mut cursor = Cursor::new(&tokens, line.number, end_column);
                        match self.pattern(&mut cursor, scope) {
                            Ok(p) => {
                                self.bind_all(scope, &p.into, line);
                                steps.push(Step::Wait(p));
                            }
                            Err(d) => self.diags.push(d),
                        }
                    }
                }
                "if" => {
                    let condition = self.tokens(line, "if").and_then(|tokens| {
                        let mut cursor = Cursor::new(&tokens, line.number, end_column);
                        let result = self
                            .condition(&mut cursor, scope)
                            .and_then(|e| cursor.finish().map(|_| e));
                        result.map_err(|d| self.diags.push(d)).ok()
                    });
                    let body = match lines.get(*index) {
                        Some(next) if next.indent > indent => {
                            let body_indent = next.indent;
                            let mut inner_scope = scope.clone();
                            self.block(lines, index, body_indent, &mut inner_scope)
                        }
                        _ => {
                            self.diags.push(Diagnostic::new(
                                line.number,
                                line.indent + 1,
                                "`if` needs an indented body",
                            ));
                            Vec::new()
                        }
                    };
                    if let Some(condition) = condition {
                        steps.push(Step::Guard { condition, body });
                    }
                }
                "assert" => {
                    if let Some(tokens) = self.tokens(line, "assert") {
                        let mut cursor = Cursor::new(&tokens, line.number, end_column);
                        let parsed = self.condition(&mut cursor, scope).and_then(|condition| {
                            let message = if cursor.eat(&Tok::Comma) {
                                match cursor.next() {
                                    Some(Spanned {
                                        tok: Tok::Literal(Value::Text(s)),
                                        ..
                                    }) => Some(s.clone()),
                                    _ => return Err(cursor.error_here("expected a message string after `,`")),
                                }
                            } else {
                                None
                            };
                            cursor.finish()?;
                            Ok(Step::Assert { condition, message })
                        });
                        match parsed {
                            Ok(step) => steps.push(step),
                            Err(d) => self.diags.push(d),
                        }
                    }
                }
                "when" => self.diags.push(Diagnostic::new(
                    line.number,
                    line.indent + 1,
                    "`when` must be the first line of a scenario",
                )),
                other => self.diags.push(Diagnostic::new(
                    line.number,
                    line.indent + 1,
                    format!("unknown step `{other}`"),
                )),
            }
        }
        steps
    }

    fn tokens(&mut self, line: &Line<'_>, keyword: &str) -> Option<Vec<Spanned>> {
        let rest = &line.content[keyword.len()..];
        match tokenize(rest, line.indent + keyword.len() + 1) {
            Ok(t) => Some(t),
            Err((column, message)) => {
                self.diags.push(Diagnostic::new(line.number, column, message));
                None
            }
        }
    }

    fn bind_all(&mut self, scope: &mut Vec<String>, names: &[String], line: &Line<'_>) {
        for name in names {
            if scope.contains(name) {
                self.diags.push(Diagnostic::new(
                    line.number,
                    line.indent + 1,
                    format!("`{name}` is already bound"),
                ));
            } else {
                scope.push(name.clone());
            }
        }
    }

    fn object(&self, cursor: &Cursor<'_>, path: &[String], column: usize) -> Result<ObjectRef, Diagnostic> {
        let joined = path.join(".");
        let object = ObjectRef::parse(&joined).expect("path segments are identifiers");
        if self.objects.contains(&object) {
            Ok(object)
        } else {
            Err(Diagnostic::new(
                cursor.line,
                column,
                format!("unknown object `{joined}`"),
            ))
        }
    }

    /// `receiver.path.label` → (receiver, label)
    fn target(&self, cursor: &mut Cursor<'_>) -> Result<(ObjectRef, String), Diagnostic> {
        let column = cursor.column();
        let mut path = cursor.path()?;
        if path.len() < 2 {
            return Err(Diagnostic::new(cursor.line, column, "expected `<receiver>.<label>`"));
        }
        let label = path.pop().unwrap_or_default();
        Ok((self.object(cursor, &path, column)?, label))
    }

    fn event(&mut self, cursor: &mut Cursor<'_>, scope: &[String]) -> Result<EventLiteral, Diagnostic> {
        let column = cursor.column();
        let sender_path = cursor.path()?;
        let sender = self.object(cursor, &sender_path, column)?;
        cursor.expect(&Tok::Arrow, "`->`")?;
        let (receiver, label) = self.target(cursor)?;
        let mut args = Vec::new();
        if cursor.eat(&Tok::LParen) && !cursor.eat(&Tok::RParen) {
            loop {
                args.push(self.value_expr(cursor, scope)?);
                if cursor.eat(&Tok::RParen) {
                    break;
                }
                cursor.expect(&Tok::Comma, "`,` or `)`")?;
            }
        }
        Ok(EventLiteral {
            sender,
            receiver,
            label,
            args,
        })
    }

    fn pattern(&mut self, cursor: &mut Cursor<'_>, scope: &[String]) -> Result<PatternClause, Diagnostic> {
        let sender = if cursor.eat(&Tok::Star) {
            None
        } else {
            let column = cursor.column();
            let path = cursor.path()?;
            Some(self.object(cursor, &path, column)?)
        };
        cursor.expect(&Tok::Arrow, "`->`")?;
        let (receiver, label) = self.target(cursor)?;
        let mut slots = None;
        if cursor.eat(&Tok::LParen) {
            let mut list = Vec::new();
            if !cursor.eat(&Tok::RParen) {
                loop {
                    if cursor.eat(&Tok::Question) {
                        list.push(SlotExpr::Free);
                    } else {
                        list.push(SlotExpr::Check(self.value_expr(cursor, scope)?));
                    }
                    if cursor.eat(&Tok::RParen) {
                        break;
                    }
                    cursor.expect(&Tok::Comma, "`,` or `)`")?;
                }
            }
            slots = Some(list);
        }
        let mut into = Vec::new();
        let into_column = cursor.column();
        if cursor.eat_ident("into") {
            loop {
                let column = cursor.column();
                match cursor.next() {
                    Some(Spanned { tok: Tok::Ident(n), .. }) if !RESERVED.contains(&n.as_str()) => into.push(n.clone()),
                    _ => return Err(Diagnostic::new(cursor.line, column, "expected a binding name")),
                }
                if !cursor.eat(&Tok::Comma) {
                    break;
                }
            }
            let mut seen = HashSet::new();
            if let Some(dup) = into.iter().find(|n| !seen.insert(n.as_str())) {
                return Err(Diagnostic::new(
                    cursor.line,
                    into_column,
                    format!("`{dup}` bound twice"),
                ));
            }
        }
        cursor.finish()?;
        let slots = match slots {
            Some(slots) => {
                let free = slots.iter().filter(|s| matches!(s, SlotExpr::Free)).count();
                if free != into.len() {
                    return Err(Diagnostic::new(
                        cursor.line,
                        into_column,
                        format!("{free} free slot(s) but {} name(s) after `into`", into.len()),
                    ));
                }
                slots
            }
            None => vec![SlotExpr::Free; into.len()],
        };
        Ok(PatternClause {
            sender,
            receiver,
            label,
            slots,
            into,
        })
    }

    fn condition(&mut self, cursor: &mut Cursor<'_>, scope: &[String]) -> Result<Expr, Diagnostic> {
        let column = cursor.column();
        let e = self.expression(cursor, scope)?;
        match expr::check(&e) {
            Ok(t @ expr::StaticType::Known(k)) if k != crate::value::ValueKind::Boolean => Err(Diagnostic::new(
                cursor.line,
                column,
                format!("condition must be boolean, found {t}"),
            )),
            Ok(expr::StaticType::Duration) => Err(Diagnostic::new(
                cursor.line,
                column,
                "condition must be boolean, found duration",
            )),
            Ok(_) => Ok(e),
            Err(m) => Err(Diagnostic::new(cursor.line, column, m)),
        }
    }

    fn value_expr(&mut self, cursor: &mut Cursor<'_>, scope: &[String]) -> Result<Expr, Diagnostic> {
        let column = cursor.column();
        let e = self.expression(cursor, scope)?;
        match expr::check(&e) {
            Ok(expr::StaticType::Duration) => Err(Diagnostic::new(
                cursor.line,
                column,
                "a duration is not a value; write `now + <n>h`",
            )),
            Ok(_) => Ok(e),
            Err(m) => Err(Diagnostic::new(cursor.line, column, m)),
        }
    }

    fn expression(&mut self, cursor: &mut Cursor<'_>, scope: &[String]) -> Result<Expr, Diagnostic> {
        ExprParser { cursor, scope }.or()
    }
}

struct ExprParser<'c, 't, 's> {
    cursor: &'c mut Cursor<'t>,
    scope: &'s [String],
}

impl ExprParser<'_, '_, '_> {
    fn or(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.and()?;
        while self.cursor.eat_ident("or") {
            lhs = Expr::binary(BinaryOp::Or, lhs, self.and()?);
        }
        Ok(lhs)
    }

    fn and(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.not()?;
        while self.cursor.eat_ident("and") {
            lhs = Expr::binary(BinaryOp::And, lhs, self.not()?);
        }
        Ok(lhs)
    }

    fn not(&mut self) -> Result<Expr, Diagnostic> {
        if self.cursor.eat_ident("not") {
            return Ok(Expr::Unary(UnaryOp::Not, Box::new(self.not()?)));
        }
        self.comparison()
    }

    fn comparison(&mut self) -> Result<Expr, Diagnostic> {
        let lhs = self.additive()?;
        let op = match self.cursor.peek() {
            Some(Tok::EqEq) => BinaryOp::Eq,
            Some(Tok::NotEq) => BinaryOp::Ne,
            Some(Tok::Lt) => BinaryOp::Lt,
            Some(Tok::Le) => BinaryOp::Le,
            Some(Tok::Gt) => BinaryOp::Gt,
            Some(Tok::Ge) => BinaryOp::Ge,
            _ => return Ok(lhs),
        };
        self.cursor.next();
        Ok(Expr::binary(op, lhs, self.additive()?))
    }

    fn additive(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.multiplicative()?;
        loop {
            let op = match self.cursor.peek() {
                Some(Tok::Plus) => BinaryOp::Add,
                Some(Tok::Minus) => BinaryOp::Sub,
                _ => return Ok(lhs),
            };
            self.cursor.next();
            lhs = Expr::binary(op, lhs, self.multiplicative()?);
        }
    }

    fn multiplicative(&mut self) -> Result<Expr, Diagnostic> {
        let mut lhs = self.unary()?;
        loop {
            let op = match self.cursor.peek() {
                Some(Tok::Star) => BinaryOp::Mul,
                Some(Tok::Slash) => BinaryOp::Div,
                _ => return Ok(lhs),
            };
            self.cursor.next();
            lhs = Expr::binary(op, lhs, self.unary()?);
        }
    }

    fn unary(&mut self) -> Result<Expr, Diagnostic> {
        if self.cursor.eat(&Tok::Minus) {
            // `-5` is a literal, `-(5)` and `-x` are negations.
            if let Some(Tok::Literal(v @ (Value::Integer(_) | Value::Decimal(_)))) = self.cursor.peek() {
                let negated = match v {
                    Value::Integer(i) => Value::Integer(-i),
                    Value::Decimal(d) => Value::Decimal(-d),
                    _ => unreachable!(),
                };
                self.cursor.next();
                return Ok(Expr::Literal(negated));
            }
            return Ok(Expr::Unary(UnaryOp::Neg, Box::new(self.unary()?)));
        }
        self.primary()
    }

    fn primary(&mut self) -> Result<Expr, Diagnostic> {
        let column = self.cursor.column();
        let line = self.cursor.line;
        match self.cursor.next().map(|s| s.tok.clone()) {
            Some(Tok::Literal(v)) => Ok(Expr::Literal(v)),
            Some(Tok::Duration(amount, unit)) => Ok(Expr::Duration { amount, unit }),
            Some(Tok::LParen) => {
                let inner = self.or()?;
                self.cursor.expect(&Tok::RParen, "`)`")?;
                Ok(inner)
            }
            Some(Tok::Ident(word)) => match word.as_str() {
                "true" => Ok(Expr::Literal(Value::Boolean(true))),
                "false" => Ok(Expr::Literal(Value::Boolean(false))),
                "now" => Ok(Expr::Now),
                w if RESERVED.contains(&w) => Err(Diagnostic::new(line, column, format!("unexpected keyword `{w}`"))),
                _ if !self.scope.contains(&word) => {
                    Err(Diagnostic::new(line, column, format!("unbound name `{word}`")))
                }
                _ => Ok(Expr::Name(word)),
            },
            Some(other) => Err(Diagnostic::new(
                line,
                column,
                format!("unexpected {}", other.describe()),
            )),
            None => Err(Diagnostic::new(line, column, "expected an expression")),
        }
    }
}

struct Cursor<'t> {
    tokens: &'t [Spanned],
    pos: usize,
    line: usize,
    end_column: usize,
}

impl<'t> Cursor<'t> {
    fn new(tokens: &'t [Spanned], line: usize, end_column: usize) -> Self {
        Cursor {
            tokens,
            pos: 0,
            line,
            end_column,
        }
    }

    fn peek(&self) -> Option<&'t Tok> {
        self.tokens.get(self.pos).map(|s| &s.tok)
    }

    fn next(&mut self) -> Option<&'t Spanned> {
        let t = self.tokens.get(self.pos);
        if t.is_some() {
            self.pos += 1;
        }
        t
    }

    fn column(&self) -> usize {
        self.tokens.get(self.pos).map_or(self.end_column, |s| s.column)
    }

    fn eat(&mut self, tok: &Tok) -> bool {
        if self.peek() == Some(tok) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn eat_ident(&mut self, word: &str) -> bool {
        if matches!(self.peek(), Some(Tok::Ident(w)) if w == word) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect(&mut self, tok: &Tok, what: &str) -> Result<(), Diagnostic> {
        if self.eat(tok) {
            Ok(())
        } else {
            Err(self.error_here(&format!("expected {what}")))
        }
    }

    fn error_here(&self, message: &str) -> Diagnostic {
        let found = self.peek().map_or("end of line".to_string(), Tok::describe);
        Diagnostic::new(self.line, self.column(), format!("{message}, found {found}"))
    }

    fn finish(&self) -> Result<(), Diagnostic> {
        if self.pos == self.tokens.len() {
            Ok(())
        } else {
            Err(self.error_here("expected end of line"))
        }
    }

    /// Dotted identifier path.
    fn path(&mut self) -> Result<Vec<String>, Diagnostic> {
        let mut path = Vec::new();
        loop {
            match self.peek() {
                Some(Tok::Ident(w)) if !RESERVED.contains(&w.as_str()) => {
                    path.push(w.clone());
                    self.pos += 1;
                }
                _ => return Err(self.error_here("expected an object path")),
            }
            if !self.eat(&Tok::Dot) {
                return Ok(path);
            }
        }
    }
}
