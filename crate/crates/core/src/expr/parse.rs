//! Recursive-descent parser.
//!
//! ```text
//! expr     := term (('+' | '-') term)*
//! term     := unary (('*' | '/') unary)*
//! unary    := '-' unary | factor
//! factor   := base ('^' exponent)?
//! exponent := '-' exponent | base ('^' exponent)?
//! base     := number | 'x' | 'pi' | 'e' | func '(' expr ')' | '(' expr ')'
//! ```
//!
//! `e^u` is read as `exp(u)`; any other power needs an exponent free of `x`.

use super::{Constant, Expr, Func};
use crate::rational;
use std::fmt;
use thiserror::Error;

pub const DEFAULT_DEPTH_LIMIT: usize = 64;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ParseError {
    #[error("empty expression")]
    Empty,
    #[error("syntax error at byte {offset}: found {found}, expected one of {}", .expected.join(", "))]
    Syntax {
        offset: usize,
        found: String,
        expected: Vec<&'static str>,
    },
    #[error("unknown identifier {name:?} at byte {offset}")]
    UnknownIdentifier { offset: usize, name: String },
    #[error("exponent at byte {offset} depends on x")]
    NonConstantExponent { offset: usize },
    #[error("expression nests deeper than {limit} levels")]
    TooDeep { limit: usize },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Number(String),
    Ident(String),
    Plus,
    Minus,
    Star,
    Slash,
    Caret,
    LParen,
    RParen,
    End,
}

impl fmt::Display for Tok {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Tok::Number(s) => write!(f, "number {s}"),
            Tok::Ident(s) => write!(f, "identifier {s}"),
            Tok::Plus => f.write_str("'+'"),
            Tok::Minus => f.write_str("'-'"),
            Tok::Star => f.write_str("'*'"),
            Tok::Slash => f.write_str("'/'"),
            Tok::Caret => f.write_str("'^'"),
            Tok::LParen => f.write_str("'('"),
            Tok::RParen => f.write_str("')'"),
            Tok::End => f.write_str("end of input"),
        }
    }
}

fn tokenize(src: &str) -> Result<Vec<(usize, Tok)>, ParseError> {
    let bytes = src.as_bytes();
    let mut out = Vec::new();
    let mut i = 0;
    while i < src.len() {
        let c = src[i..].chars().next().expect("in bounds");
        let start = i;
        let simple = match c {
            '+' => Some(Tok::Plus),
            '-' | '\u{2212}' => Some(Tok::Minus),
            '*' | '\u{00d7}' => Some(Tok::Star),
            '/' => Some(Tok::Slash),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            _ => None,
        };
        if let Some(t) = simple {
            out.push((start, t));
            i += c.len_utf8();
            continue;
        }
        if c.is_whitespace() {
            i += c.len_utf8();
            continue;
        }
        if c.is_ascii_digit() || c == '.' {
            while i < bytes.len() && (bytes[i].is_ascii_digit() || bytes[i] == b'.') {
                i += 1;
            }
            // scientific suffix only when digits follow, so "2e" stays two tokens
            if i < bytes.len() && (bytes[i] == b'e' || bytes[i] == b'E') {
                let mut j = i + 1;
                if j < bytes.len() && (bytes[j] == b'+' || bytes[j] == b'-') {
                    j += 1;
                }
                if j < bytes.len() && bytes[j].is_ascii_digit() {
                    while j < bytes.len() && bytes[j].is_ascii_digit() {
                        j += 1;
                    }
                    i = j;
                }
            }
            out.push((start, Tok::Number(src[start..i].to_string())));
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' {
            while i < bytes.len() && (bytes[i].is_ascii_alphanumeric() || bytes[i] == b'_') {
                i += 1;
            }
            out.push((start, Tok::Ident(src[start..i].to_string())));
            continue;
        }
        return Err(ParseError::Syntax {
            offset: start,
            found: format!("character {c:?}"),
            expected: vec!["number", "identifier", "operator", "'('", "')'"],
        });
    }
    out.push((src.len(), Tok::End));
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    pos: usize,
    depth: usize,
    limit: usize,
}

impl Parser {
    fn peek(&self) -> &Tok {
        &self.toks[self.pos].1
    }

    fn offset(&self) -> usize {
        self.toks[self.pos].0
    }

    fn bump(&mut self) -> Tok {
        let t = self.toks[self.pos].1.clone();
        if self.pos + 1 < self.toks.len() {
            self.pos += 1;
        }
        t
    }

    fn fail(&self, expected: &[&'static str]) -> ParseError {
        ParseError::Syntax {
            offset: self.offset(),
            found: self.peek().to_string(),
            expected: expected.to_vec(),
        }
    }

    fn enter(&mut self) -> Result<(), ParseError> {
        self.depth += 1;
        if self.depth > self.limit {
            return Err(ParseError::TooDeep { limit: self.limit });
        }
        Ok(())
    }

    fn expr(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let mut terms = vec![self.term()?];
        loop {
            match self.peek() {
                Tok::Plus => {
                    self.bump();
                    terms.push(self.term()?);
                }
                Tok::Minus => {
                    self.bump();
                    terms.push(Expr::neg(self.term()?));
                }
                _ => break,
            }
        }
        self.depth -= 1;
        Ok(if terms.len() == 1 {
            terms.pop().expect("one term")
        } else {
            Expr::Add(terms)
        })
    }

    fn term(&mut self) -> Result<Expr, ParseError> {
        let mut factors = vec![self.unary()?];
        loop {
            match self.peek() {
                Tok::Star => {
                    self.bump();
                    factors.push(self.unary()?);
                }
                Tok::Slash => {
                    self.bump();
                    let rhs = self.unary()?;
                    let lhs = collapse(std::mem::take(&mut factors));
                    factors.push(Expr::div(lhs, rhs));
                }
                _ => break,
            }
        }
        Ok(collapse(factors))
    }

    fn unary(&mut self) -> Result<Expr, ParseError> {
        if *self.peek() == Tok::Minus {
            self.bump();
            self.enter()?;
            let inner = self.unary()?;
            self.depth -= 1;
            return Ok(Expr::neg(inner));
        }
        self.factor()
    }

    fn factor(&mut self) -> Result<Expr, ParseError> {
        let base = self.base()?;
        if *self.peek() != Tok::Caret {
            return Ok(base);
        }
        self.bump();
        let at = self.offset();
        let exponent = self.exponent()?;
        if base == Expr::Const(Constant::E) {
            return Ok(Expr::call(Func::Exp, exponent));
        }
        if !exponent.is_constant() {
            return Err(ParseError::NonConstantExponent { offset: at });
        }
        Ok(Expr::pow(base, exponent))
    }

    fn exponent(&mut self) -> Result<Expr, ParseError> {
        self.enter()?;
        let out = if *self.peek() == Tok::Minus {
            self.bump();
            Expr::neg(self.exponent()?)
        } else {
            self.factor()?
        };
        self.depth -= 1;
        Ok(out)
    }

    fn base(&mut self) -> Result<Expr, ParseError> {
        const EXPECTED: &[&str] = &["number", "'x'", "'pi'", "'e'", "function", "'('", "'-'"];
        let at = self.offset();
        match self.peek().clone() {
            Tok::Number(text) => {
                self.bump();
                let q = rational::parse_decimal(&text).ok_or(ParseError::Syntax {
                    offset: at,
                    found: format!("malformed number {text}"),
                    expected: vec!["number"],
                })?;
                Ok(Expr::Num(q))
            }
            Tok::Ident(name) => {
                self.bump();
                match name.as_str() {
                    "x" => Ok(Expr::X),
                    "pi" => Ok(Expr::Const(Constant::Pi)),
                    "e" => Ok(Expr::Const(Constant::E)),
                    _ => {
                        let f = Func::from_name(&name).ok_or(ParseError::UnknownIdentifier {
                            offset: at,
                            name: name.clone(),
                        })?;
                        self.expect(Tok::LParen, "'('")?;
                        let arg = self.expr()?;
                        self.expect(Tok::RParen, "')'")?;
                        Ok(Expr::call(f, arg))
                    }
                }
            }
            Tok::LParen => {
                self.bump();
                let inner = self.expr()?;
                self.expect(Tok::RParen, "')'")?;
                Ok(inner)
            }
            _ => Err(self.fail(EXPECTED)),
        }
    }

    fn expect(&mut self, tok: Tok, name: &'static str) -> Result<(), ParseError> {
        if *self.peek() == tok {
            self.bump();
            Ok(())
        } else {
            Err(self.fail(&[name]))
        }
    }
}

fn collapse(mut factors: Vec<Expr>) -> Expr {
    if factors.len() == 1 {
        factors.pop().expect("one factor")
    } else {
        Expr::Mul(factors)
    }
}

pub fn parse(source: &str) -> Result<Expr, ParseError> {
    parse_with_limit(source, DEFAULT_DEPTH_LIMIT)
}

pub fn parse_with_limit(source: &str, limit: usize) -> Result<Expr, ParseError> {
    if source.trim().is_empty() {
        return Err(ParseError::Empty);
    }
    let mut p = Parser {
        toks: tokenize(source)?,
        pos: 0,
        depth: 0,
        limit,
    };
    let e = p.expr()?;
    if *p.peek() != Tok::End {
        return Err(p.fail(&["operator", "end of input"]));
    }
    if e.depth() > limit {
        return Err(ParseError::TooDeep { limit });
    }
    Ok(e)
}
