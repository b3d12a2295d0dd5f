//! Expression trees for initial functions.
//!
//! Text is parsed with [`parse`], differentiated symbolically with
//! [`Expr::differentiate`], evaluated in double precision with [`Expr::eval`],
//! and routed to exact arithmetic with [`Expr::to_polynomial`] when it is a
//! polynomial with rational coefficients.

mod diff;
mod eval;
mod parse;
mod render;
mod simplify;
mod tower;

pub use eval::{Compiled, EvalError, EvalErrorKind};
pub use parse::{parse, parse_with_limit, ParseError, DEFAULT_DEPTH_LIMIT};
pub use tower::DerivativeTower;

use crate::poly::Poly;
use crate::rational::{self, Rational};
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::fmt;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Constant {
    Pi,
    E,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Func {
    Exp,
    Ln,
    Sin,
    Cos,
    Tan,
    Sinh,
    Cosh,
}

impl Func {
    pub const ALL: [Func; 7] = [
        Func::Exp,
        Func::Ln,
        Func::Sin,
        Func::Cos,
        Func::Tan,
        Func::Sinh,
        Func::Cosh,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Func::Exp => "exp",
            Func::Ln => "ln",
            Func::Sin => "sin",
            Func::Cos => "cos",
            Func::Tan => "tan",
            Func::Sinh => "sinh",
            Func::Cosh => "cosh",
        }
    }

    pub fn from_name(name: &str) -> Option<Func> {
        Func::ALL.into_iter().find(|f| f.name() == name)
    }

    pub fn apply(self, v: f64) -> f64 {
        match self {
            Func::Exp => v.exp(),
            Func::Ln => v.ln(),
            Func::Sin => v.sin(),
            Func::Cos => v.cos(),
            Func::Tan => v.tan(),
            Func::Sinh => v.sinh(),
            Func::Cosh => v.cosh(),
        }
    }
}

/// Expression node. Subtraction is `Add` with a `Neg` term; `Add` and `Mul`
/// hold at least two operands once simplified.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub enum Expr {
    Num(Rational),
    Const(Constant),
    X,
    Neg(Box<Expr>),
    Add(Vec<Expr>),
    Mul(Vec<Expr>),
    Div(Box<Expr>, Box<Expr>),
    /// Exponent never mentions `x`.
    Pow(Box<Expr>, Box<Expr>),
    Call(Func, Box<Expr>),
}

impl Expr {
    pub fn num(q: Rational) -> Self {
        Expr::Num(q)
    }

    pub fn int(n: i64) -> Self {
        Expr::Num(rational::int(n))
    }

    pub fn zero() -> Self {
        Expr::int(0)
    }

    pub fn one() -> Self {
        Expr::int(1)
    }

    /// A float constant, stored as the shortest decimal that rounds back to it.
    pub fn float(v: f64) -> Self {
        Expr::Num(rational::from_f64_shortest(v).expect("finite constant"))
    }

    pub fn call(f: Func, arg: Expr) -> Self {
        Expr::Call(f, Box::new(arg))
    }

    pub fn pow(base: Expr, exp: Expr) -> Self {
        Expr::Pow(Box::new(base), Box::new(exp))
    }

    pub fn div(num: Expr, den: Expr) -> Self {
        Expr::Div(Box::new(num), Box::new(den))
    }

    #[allow(clippy::should_implement_trait)]
    pub fn neg(e: Expr) -> Self {
        Expr::Neg(Box::new(e))
    }

    pub fn from_poly(p: &Poly) -> Self {
        let terms: Vec<Expr> = p
            .coeffs()
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(k, c)| {
                let power = match k {
                    0 => Expr::one(),
                    1 => Expr::X,
                    _ => Expr::pow(Expr::X, Expr::int(k as i64)),
                };
                Expr::Mul(vec![Expr::Num(c.clone()), power])
            })
            .collect();
        Expr::Add(terms).simplify()
    }

    pub fn is_num(&self) -> bool {
        matches!(self, Expr::Num(_))
    }

    pub fn as_num(&self) -> Option<&Rational> {
        match self {
            Expr::Num(q) => Some(q),
            _ => None,
        }
    }

    /// True when `x` does not occur.
    pub fn is_constant(&self) -> bool {
        match self {
            Expr::X => false,
            Expr::Num(_) | Expr::Const(_) => true,
            Expr::Neg(a) | Expr::Call(_, a) => a.is_constant(),
            Expr::Add(v) | Expr::Mul(v) => v.iter().all(Expr::is_constant),
            Expr::Div(a, b) | Expr::Pow(a, b) => a.is_constant() && b.is_constant(),
        }
    }

    pub fn depth(&self) -> usize {
        1 + match self {
            Expr::Num(_) | Expr::Const(_) | Expr::X => 0,
            Expr::Neg(a) | Expr::Call(_, a) => a.depth(),
            Expr::Add(v) | Expr::Mul(v) => v.iter().map(Expr::depth).max().unwrap_or(0),
            Expr::Div(a, b) | Expr::Pow(a, b) => a.depth().max(b.depth()),
        }
    }

    /// Replaces every `x` by `with`.
    pub fn substitute(&self, with: &Expr) -> Expr {
        let go = |e: &Expr| Box::new(e.substitute(with));
        match self {
            Expr::X => with.clone(),
            Expr::Num(_) | Expr::Const(_) => self.clone(),
            Expr::Neg(a) => Expr::Neg(go(a)),
            Expr::Call(f, a) => Expr::Call(*f, go(a)),
            Expr::Add(v) => Expr::Add(v.iter().map(|e| e.substitute(with)).collect()),
            Expr::Mul(v) => Expr::Mul(v.iter().map(|e| e.substitute(with)).collect()),
            Expr::Div(a, b) => Expr::Div(go(a), go(b)),
            Expr::Pow(a, b) => Expr::Pow(go(a), b.clone()),
        }
    }

    /// `e(x) -> e(x + h)`, simplified.
    pub fn shift(&self, h: &Rational) -> Expr {
        if h.is_zero() {
            return self.clone();
        }
        self.substitute(&Expr::Add(vec![Expr::X, Expr::Num(h.clone())]))
            .simplify()
    }

    /// Exact polynomial if the expression uses only rational constants, `x`,
    /// `+ - *`, division by nonzero constants and non-negative integer powers.
    pub fn to_polynomial(&self) -> Option<Poly> {
        match self {
            Expr::Num(q) => Some(Poly::constant(q.clone())),
            Expr::X => Some(Poly::x()),
            Expr::Const(_) | Expr::Call(..) => None,
            Expr::Neg(a) => a.to_polynomial().map(|p| -&p),
            Expr::Add(v) => v
                .iter()
                .try_fold(Poly::zero(), |acc, e| Some(&acc + &e.to_polynomial()?)),
            Expr::Mul(v) => v
                .iter()
                .try_fold(Poly::one(), |acc, e| Some(&acc * &e.to_polynomial()?)),
            Expr::Div(a, b) => {
                let den = b.to_polynomial()?;
                if den.degree() != Some(0) {
                    return None;
                }
                let c = den.coeff(0);
                Some(a.to_polynomial()?.scale(&(Rational::one() / c)))
            }
            Expr::Pow(a, b) => {
                let e = b.to_polynomial()?;
                let k = match e.degree() {
                    None => 0u32,
                    Some(0) => {
                        let c = e.coeff(0);
                        if !c.is_integer() || c.is_negative() {
                            return None;
                        }
                        c.to_integer().to_u32()?
                    }
                    Some(_) => return None,
                };
                let base = a.to_polynomial()?;
                Some((0..k).fold(Poly::one(), |acc, _| &acc * &base))
            }
        }
    }

    pub fn render(&self) -> String {
        self.to_string()
    }
}

impl From<Poly> for Expr {
    fn from(p: Poly) -> Self {
        Expr::from_poly(&p)
    }
}

impl fmt::Display for Constant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Constant::Pi => "pi",
            Constant::E => "e",
        })
    }
}
