//! Prefix s-expression parser for [`Formula`].

use super::formula::{Formula, KEYWORDS};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
enum Token<'a> {
    Open,
    Close,
    Word(&'a str),
}

struct Lexer<'a> {
    text: &'a str,
    pos: usize,
}

impl<'a> Lexer<'a> {
    fn new(text: &'a str) -> Self {
        Lexer { text, pos: 0 }
    }

    fn skip_ws(&mut self) {
        let rest = &self.text[self.pos..];
        self.pos += rest.len() - rest.trim_start().len();
    }

    /// Returns the next token with its starting byte offset.
    fn next(&mut self) -> Result<Option<(usize, Token<'a>)>> {
        self.skip_ws();
        let start = self.pos;
        let rest = &self.text[start..];
        let Some(c) = rest.chars().next() else {
            return Ok(None);
        };
        match c {
            '(' => {
                self.pos += 1;
                Ok(Some((start, Token::Open)))
            }
            ')' => {
                self.pos += 1;
                Ok(Some((start, Token::Close)))
            }
            c if c.is_ascii_alphabetic() || c == '_' => {
                let len = rest
                    .find(|c: char| !(c.is_ascii_alphanumeric() || c == '_'))
                    .unwrap_or(rest.len());
                self.pos += len;
                Ok(Some((start, Token::Word(&rest[..len]))))
            }
            other => Err(err(start, format!("unexpected character {other:?}"))),
        }
    }

    fn peek(&mut self) -> Result<Option<(usize, Token<'a>)>> {
        let saved = self.pos;
        let tok = self.next();
        self.pos = saved;
        tok
    }
}

fn err(offset: usize, message: impl Into<String>) -> Error {
    Error::Parse {
        offset,
        message: message.into(),
    }
}

/// Parses a single formula; trailing input is an error.
pub fn parse_formula(text: &str) -> Result<Formula> {
    let mut lexer = Lexer::new(text);
    let f = parse_inner(&mut lexer)?;
    if let Some((off, _)) = lexer.next()? {
        return Err(err(off, "expected end of input"));
    }
    Ok(f)
}

fn parse_inner(lexer: &mut Lexer<'_>) -> Result<Formula> {
    let end = lexer.text.len();
    match lexer.next()? {
        None => Err(err(end, "expected formula, found end of input")),
        Some((off, Token::Close)) => Err(err(off, "expected formula, found `)`")),
        Some((off, Token::Word(w))) => match w {
            "true" => Ok(Formula::True),
            "false" => Ok(Formula::False),
            w if KEYWORDS.contains(&w) => Err(err(off, format!("`{w}` is an operator, expected atom"))),
            w => Ok(Formula::Atom(w.to_string())),
        },
        Some((open, Token::Open)) => {
            let op = match lexer.next()? {
                Some((_, Token::Word(w))) if KEYWORDS[2..].contains(&w) => w,
                Some((off, _)) => {
                    return Err(err(off, "expected operator: not, and, or, implies, iff"))
                }
                None => return Err(err(end, "expected operator, found end of input")),
            };
            let mut args = Vec::new();
            loop {
                match lexer.peek()? {
                    Some((_, Token::Close)) => {
                        lexer.next()?;
                        break;
                    }
                    None => return Err(err(end, format!("unclosed `(` opened at byte {open}"))),
                    _ => args.push(parse_inner(lexer)?),
                }
            }
            build(op, args, open)
        }
    }
}

fn build(op: &str, mut args: Vec<Formula>, offset: usize) -> Result<Formula> {
    let arity = |want: &str| err(offset, format!("`{op}` expects {want} operand(s), got {}", args.len()));
    match op {
        "not" if args.len() == 1 => Ok(Formula::not(args.pop().unwrap())),
        "not" => Err(arity("1")),
        "and" | "or" if args.len() < 2 => Err(arity("at least 2")),
        "and" => Ok(Formula::And(args)),
        "or" => Ok(Formula::Or(args)),
        "implies" | "iff" if args.len() != 2 => Err(arity("2")),
        _ => {
            let rhs = args.pop().unwrap();
            let lhs = args.pop().unwrap();
            Ok(if op == "implies" {
                Formula::implies(lhs, rhs)
            } else {
                Formula::iff(lhs, rhs)
            })
        }
    }
}
