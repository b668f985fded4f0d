//! Tokens of a single `.scn` line.

use super::ast::DurationUnit;
use crate::value::{Timestamp, Value};

#[derive(Clone, Debug, PartialEq)]
pub enum Tok {
    Ident(String),
    Literal(Value),
    Duration(i64, DurationUnit),
    Arrow,
    Dot,
    Comma,
    LParen,
    RParen,
    Star,
    Question,
    EqEq,
    NotEq,
    Lt,
    Le,
    Gt,
    Ge,
    Plus,
    Minus,
    Slash,
}

impl Tok {
    pub fn describe(&self) -> String {
        match self {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Literal(v) => format!("`{v}`"),
            Tok::Duration(n, u) => format!("`{n}{}`", u.suffix()),
            Tok::Arrow => "`->`".into(),
            Tok::Dot => "`.`".into(),
            Tok::Comma => "`,`".into(),
            Tok::LParen => "`(`".into(),
            Tok::RParen => "`)`".into(),
            Tok::Star => "`*`".into(),
            Tok::Question => "`?`".into(),
            Tok::EqEq => "`==`".into(),
            Tok::NotEq => "`!=`".into(),
            Tok::Lt => "`<`".into(),
            Tok::Le => "`<=`".into(),
            Tok::Gt => "`>`".into(),
            Tok::Ge => "`>=`".into(),
            Tok::Plus => "`+`".into(),
            Tok::Minus => "`-`".into(),
            Tok::Slash => "`/`".into(),
        }
    }
}

/// A token with its 1-based column in the source line.
#[derive(Clone, Debug, PartialEq)]
pub struct Spanned {
    pub tok: Tok,
    pub column: usize,
}

/// Splits `text` (starting at 1-based `first_column`) into tokens.
/// Errors carry the offending column.
pub fn tokenize(text: &str, first_column: usize) -> Result<Vec<Spanned>, (usize, String)> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        let column = first_column + i;
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let push = |out: &mut Vec<Spanned>, tok| out.push(Spanned { tok, column });
        let next = chars.get(i + 1).copied();
        match c {
            '-' if next == Some('>') => {
                push(&mut out, Tok::Arrow);
                i += 2;
            }
            '=' if next == Some('=') => {
                push(&mut out, Tok::EqEq);
                i += 2;
            }
            '!' if next == Some('=') => {
                push(&mut out, Tok::NotEq);
                i += 2;
            }
            '<' if next == Some('=') => {
                push(&mut out, Tok::Le);
                i += 2;
            }
            '>' if next == Some('=') => {
                push(&mut out, Tok::Ge);
                i += 2;
            }
            '<' | '>' | '.' | ',' | '(' | ')' | '*' | '?' | '+' | '-' | '/' => {
                let tok = match c {
                    '<' => Tok::Lt,
                    '>' => Tok::Gt,
                    '.' => Tok::Dot,
                    ',' => Tok::Comma,
                    '(' => Tok::LParen,
                    ')' => Tok::RParen,
                    '*' => Tok::Star,
                    '?' => Tok::Question,
                    '+' => Tok::Plus,
                    '-' => Tok::Minus,
                    _ => Tok::Slash,
                };
                push(&mut out, tok);
                i += 1;
            }
            '"' => {
                let mut s = String::new();
                i += 1;
                loop {
                    match chars.get(i) {
                        None => return Err((column, "unterminated string literal".into())),
                        Some('"') => break,
                        Some('\\') => {
                            let escaped = match chars.get(i + 1) {
                                Some('"') => '"',
                                Some('\\') => '\\',
                                Some('n') => '\n',
                                Some('t') => '\t',
                                _ => return Err((first_column + i, "unknown escape sequence".into())),
                            };
                            s.push(escaped);
                            i += 2;
                        }
                        Some(&ch) => {
                            s.push(ch);
                            i += 1;
                        }
                    }
                }
                i += 1;
                push(&mut out, Tok::Literal(Value::Text(s)));
            }
            '@' => {
                let start = i + 1;
                let mut end = start;
                if chars.get(end) == Some(&'-') {
                    end += 1;
                }
                while chars.get(end).is_some_and(|c| c.is_ascii_digit()) {
                    end += 1;
                }
                let digits: String = chars[start..end].iter().collect();
                let millis: i64 = digits
                    .parse()
                    .map_err(|_| (column, "expected milliseconds after `@`".to_string()))?;
                push(&mut out, Tok::Literal(Value::Timestamp(Timestamp(millis))));
                i = end;
            }
            c if c.is_ascii_digit() => {
                let mut end = i;
                while chars.get(end).is_some_and(|c| c.is_ascii_digit()) {
                    end += 1;
                }
                let is_decimal = chars.get(end) == Some(&'.') && chars.get(end + 1).is_some_and(|c| c.is_ascii_digit());
                if is_decimal {
                    end += 1;
                    while chars.get(end).is_some_and(|c| c.is_ascii_digit()) {
                        end += 1;
                    }
                }
                let number: String = chars[i..end].iter().collect();
                let mut suffix_end = end;
                while chars.get(suffix_end).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                    suffix_end += 1;
                }
                let suffix: String = chars[end..suffix_end].iter().collect();
                let tok = if suffix.is_empty() {
                    if is_decimal {
                        Tok::Literal(Value::Decimal(
                            number.parse().map_err(|_| (column, "invalid decimal".to_string()))?,
                        ))
                    } else {
                        Tok::Literal(Value::Integer(
                            number
                                .parse()
                                .map_err(|_| (column, "integer literal out of range".to_string()))?,
                        ))
                    }
                } else {
                    let unit = match suffix.as_str() {
                        "h" => DurationUnit::Hours,
                        "m" => DurationUnit::Minutes,
                        "s" => DurationUnit::Seconds,
                        "ms" => DurationUnit::Millis,
                        other => return Err((first_column + end, format!("unknown duration unit `{other}`"))),
                    };
                    if is_decimal {
                        return Err((column, "durations must be whole numbers".into()));
                    }
                    Tok::Duration(
                        number
                            .parse()
                            .map_err(|_| (column, "duration out of range".to_string()))?,
                        unit,
                    )
                };
                push(&mut out, tok);
                i = suffix_end;
            }
            c if c.is_alphabetic() || c == '_' => {
                let mut end = i;
                while chars.get(end).is_some_and(|c| c.is_alphanumeric() || *c == '_') {
                    end += 1;
                }
                push(&mut out, Tok::Ident(chars[i..end].iter().collect()));
                i = end;
            }
            other => return Err((column, format!("unexpected character `{other}`"))),
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn toks(s: &str) -> Vec<Tok> {
        tokenize(s, 1).unwrap().into_iter().map(|t| t.tok).collect()
    }

    #[test]
    fn event_line() {
        assert_eq!(
            toks("a -> b.c(1, 2.5, \"x\")"),
            vec![
                Tok::Ident("a".into()),
                Tok::Arrow,
                Tok::Ident("b".into()),
                Tok::Dot,
                Tok::Ident("c".into()),
                Tok::LParen,
                Tok::Literal(Value::Integer(1)),
                Tok::Comma,
                Tok::Literal(Value::Decimal(2.5)),
                Tok::Comma,
                Tok::Literal(Value::Text("x".into())),
                Tok::RParen,
            ]
        );
    }

    #[test]
    fn durations_and_timestamps() {
        assert_eq!(
            toks("now + 6h - 30ms @-5"),
            vec![
                Tok::Ident("now".into()),
                Tok::Plus,
                Tok::Duration(6, DurationUnit::Hours),
                Tok::Minus,
                Tok::Duration(30, DurationUnit::Millis),
                Tok::Literal(Value::Timestamp(Timestamp(-5))),
            ]
        );
    }

    #[test]
    fn columns_are_one_based_and_offset() {
        let t = tokenize("x  y", 5).unwrap();
        assert_eq!(t[0].column, 5);
        assert_eq!(t[1].column, 8);
    }

    #[test]
    fn errors() {
        assert!(tokenize("\"open", 1).is_err());
        assert!(tokenize("3days", 1).is_err());
        assert_eq!(tokenize("a $", 1).unwrap_err().0, 3);
    }
}
