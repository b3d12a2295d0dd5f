use super::Expr;
use crate::rational::{self, Rational};
use num_traits::Signed;
use std::fmt;

const SUM: u8 = 1;
const PRODUCT: u8 = 2;
const UNARY: u8 = 3;
const POWER: u8 = 4;
const ATOM: u8 = 5;

fn num_text(q: &Rational) -> String {
    if q.is_integer() {
        q.numer().to_string()
    } else {
        rational::to_decimal_text(q).unwrap_or_else(|| rational::to_text(q))
    }
}

fn precedence(e: &Expr) -> u8 {
    match e {
        Expr::Add(_) => SUM,
        Expr::Mul(_) | Expr::Div(..) => PRODUCT,
        Expr::Neg(_) => UNARY,
        Expr::Num(q) if q.is_negative() => UNARY,
        Expr::Num(q) if num_text(q).contains('/') => PRODUCT,
        Expr::Pow(..) => POWER,
        _ => ATOM,
    }
}

struct Wrap<'a>(&'a Expr, bool);

impl fmt::Display for Wrap<'_> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.1 {
            write!(f, "({})", self.0)
        } else {
            write!(f, "{}", self.0)
        }
    }
}

fn wrap_below(e: &Expr, min: u8) -> Wrap<'_> {
    Wrap(e, precedence(e) < min)
}

impl fmt::Display for Expr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Expr::Num(q) => {
                if q.is_negative() {
                    write!(f, "-{}", num_text(&-q))
                } else {
                    f.write_str(&num_text(q))
                }
            }
            Expr::Const(c) => write!(f, "{c}"),
            Expr::X => f.write_str("x"),
            Expr::Call(func, arg) => write!(f, "{}({arg})", func.name()),
            Expr::Neg(a) => write!(f, "-{}", wrap_below(a, UNARY)),
            Expr::Add(terms) => {
                for (i, t) in terms.iter().enumerate() {
                    if i == 0 {
                        write!(f, "{}", wrap_below(t, PRODUCT))?;
                        continue;
                    }
                    match t {
                        Expr::Neg(inner) => write!(f, " - {}", wrap_below(inner, PRODUCT))?,
                        Expr::Num(q) if q.is_negative() => write!(f, " - {}", num_text(&-q))?,
                        _ => write!(f, " + {}", wrap_below(t, PRODUCT))?,
                    }
                }
                Ok(())
            }
            Expr::Mul(factors) => {
                for (i, t) in factors.iter().enumerate() {
                    if i == 0 {
                        let nested = matches!(t, Expr::Mul(_));
                        write!(f, "{}", Wrap(t, nested || precedence(t) < PRODUCT))?;
                    } else {
                        write!(f, "*{}", wrap_below(t, POWER))?;
                    }
                }
                Ok(())
            }
            Expr::Div(a, b) => write!(f, "{}/{}", wrap_below(a, PRODUCT), wrap_below(b, POWER)),
            Expr::Pow(b, e) => write!(f, "{}^{}", wrap_below(b, ATOM), wrap_below(e, ATOM)),
        }
    }
}
