//! Double-precision evaluation.
//!
//! [`Expr::eval`] walks the exact tree and reports the failing subtree.
//! [`Compiled`] is the same tree with constants pre-converted to `f64`, used
//! in hot loops (quadrature, residual grids); it falls back to the exact walk
//! to describe an error.

use super::{Constant, Expr, Func};
use crate::rational;
use std::fmt;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EvalErrorKind {
    DivisionByZero,
    LogDomain,
    PowerDomain,
    NonFinite,
}

impl fmt::Display for EvalErrorKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            EvalErrorKind::DivisionByZero => "division by zero",
            EvalErrorKind::LogDomain => "logarithm of a non-positive value",
            EvalErrorKind::PowerDomain => "fractional power of a negative value",
            EvalErrorKind::NonFinite => "non-finite result",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
#[error("{kind} in `{subtree}` at x = {x}")]
pub struct EvalError {
    pub kind: EvalErrorKind,
    pub subtree: Expr,
    pub x: f64,
}

fn constant(c: Constant) -> f64 {
    match c {
        Constant::Pi => std::f64::consts::PI,
        Constant::E => std::f64::consts::E,
    }
}

fn pow_checked(b: f64, e: f64) -> Result<f64, EvalErrorKind> {
    if e.fract() == 0.0 && e.abs() <= i32::MAX as f64 {
        if b == 0.0 && e < 0.0 {
            return Err(EvalErrorKind::DivisionByZero);
        }
        let out = b.powi(e as i32);
        return if out.is_finite() {
            Ok(out)
        } else {
            Err(EvalErrorKind::NonFinite)
        };
    }
    if b < 0.0 {
        return Err(EvalErrorKind::PowerDomain);
    }
    let out = b.powf(e);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(EvalErrorKind::NonFinite)
    }
}

fn call_checked(f: Func, v: f64) -> Result<f64, EvalErrorKind> {
    if f == Func::Ln && v <= 0.0 {
        return Err(EvalErrorKind::LogDomain);
    }
    let out = f.apply(v);
    if out.is_finite() {
        Ok(out)
    } else {
        Err(EvalErrorKind::NonFinite)
    }
}

impl Expr {
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        let fail = |kind| EvalError {
            kind,
            subtree: self.clone(),
            x,
        };
        Ok(match self {
            Expr::Num(q) => rational::to_f64(q),
            Expr::Const(c) => constant(*c),
            Expr::X => x,
            Expr::Neg(a) => -a.eval(x)?,
            Expr::Add(v) => v.iter().try_fold(0.0, |acc, e| Ok(acc + e.eval(x)?))?,
            Expr::Mul(v) => v.iter().try_fold(1.0, |acc, e| Ok(acc * e.eval(x)?))?,
            Expr::Div(a, b) => {
                let den = b.eval(x)?;
                if den == 0.0 {
                    return Err(fail(EvalErrorKind::DivisionByZero));
                }
                a.eval(x)? / den
            }
            Expr::Pow(a, b) => pow_checked(a.eval(x)?, b.eval(x)?).map_err(fail)?,
            Expr::Call(f, a) => call_checked(*f, a.eval(x)?).map_err(fail)?,
        })
    }

    pub fn compile(&self) -> Compiled {
        Compiled {
            node: Node::from_expr(self),
            source: self.clone(),
        }
    }
}

#[derive(Debug, Clone)]
enum Node {
    Value(f64),
    X,
    Neg(Box<Node>),
    Add(Vec<Node>),
    Mul(Vec<Node>),
    Div(Box<Node>, Box<Node>),
    Pow(Box<Node>, Box<Node>),
    Call(Func, Box<Node>),
}

impl Node {
    fn from_expr(e: &Expr) -> Node {
        let go = |a: &Expr| Box::new(Node::from_expr(a));
        match e {
            Expr::Num(q) => Node::Value(rational::to_f64(q)),
            Expr::Const(c) => Node::Value(constant(*c)),
            Expr::X => Node::X,
            Expr::Neg(a) => Node::Neg(go(a)),
            Expr::Add(v) => Node::Add(v.iter().map(Node::from_expr).collect()),
            Expr::Mul(v) => Node::Mul(v.iter().map(Node::from_expr).collect()),
            Expr::Div(a, b) => Node::Div(go(a), go(b)),
            Expr::Pow(a, b) => Node::Pow(go(a), go(b)),
            Expr::Call(f, a) => Node::Call(*f, go(a)),
        }
    }

    fn eval(&self, x: f64) -> Option<f64> {
        Some(match self {
            Node::Value(v) => *v,
            Node::X => x,
            Node::Neg(a) => -a.eval(x)?,
            Node::Add(v) => {
                let mut acc = 0.0;
                for n in v {
                    acc += n.eval(x)?;
                }
                acc
            }
            Node::Mul(v) => {
                let mut acc = 1.0;
                for n in v {
                    acc *= n.eval(x)?;
                }
                acc
            }
            Node::Div(a, b) => {
                let den = b.eval(x)?;
                if den == 0.0 {
                    return None;
                }
                a.eval(x)? / den
            }
            Node::Pow(a, b) => pow_checked(a.eval(x)?, b.eval(x)?).ok()?,
            Node::Call(f, a) => call_checked(*f, a.eval(x)?).ok()?,
        })
    }
}

/// An expression prepared for repeated evaluation.
#[derive(Debug, Clone)]
pub struct Compiled {
    node: Node,
    source: Expr,
}

impl Compiled {
    pub fn eval(&self, x: f64) -> Result<f64, EvalError> {
        match self.node.eval(x) {
            Some(v) => Ok(v),
            None => Err(self
                .source
                .eval(x)
                .expect_err("compiled and exact evaluation agree on failure")),
        }
    }

    pub fn source(&self) -> &Expr {
        &self.source
    }
}
