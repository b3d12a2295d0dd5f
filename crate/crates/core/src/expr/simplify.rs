//! Conservative simplification: exact constant folding, 0/1 absorption and
//! flattening of nested sums and products. No reordering beyond moving the
//! numeric coefficient to the front, and no trig identities.

use super::{Expr, Func};
use crate::rational::Rational;
use num_traits::{One, ToPrimitive, Zero};

impl Expr {
    pub fn simplify(&self) -> Expr {
        match self {
            Expr::Num(_) | Expr::Const(_) | Expr::X => self.clone(),
            Expr::Neg(a) => negate(a.simplify()),
            Expr::Add(v) => sum(v.iter().map(Expr::simplify).collect()),
            Expr::Mul(v) => product(v.iter().map(Expr::simplify).collect()),
            Expr::Div(a, b) => quotient(a.simplify(), b.simplify()),
            Expr::Pow(a, b) => power(a.simplify(), b.simplify()),
            Expr::Call(f, a) => call(*f, a.simplify()),
        }
    }
}

pub(super) fn negate(e: Expr) -> Expr {
    match e {
        Expr::Num(q) => Expr::Num(-q),
        Expr::Neg(inner) => *inner,
        Expr::Mul(mut v) if v.first().is_some_and(Expr::is_num) => {
            let Expr::Num(c) = v.remove(0) else {
                unreachable!()
            };
            v.insert(0, Expr::Num(-c));
            product(v)
        }
        other => Expr::Neg(Box::new(other)),
    }
}

pub(super) fn sum(items: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(items.len());
    let mut constant = Rational::zero();
    for item in items {
        match item {
            Expr::Add(inner) => {
                for t in inner {
                    match t {
                        Expr::Num(q) => constant += q,
                        t => flat.push(t),
                    }
                }
            }
            Expr::Num(q) => constant += q,
            t => flat.push(t),
        }
    }
    if !constant.is_zero() {
        flat.push(Expr::Num(constant));
    }
    match flat.len() {
        0 => Expr::zero(),
        1 => flat.pop().expect("one term"),
        _ => Expr::Add(flat),
    }
}

pub(super) fn product(items: Vec<Expr>) -> Expr {
    let mut flat = Vec::with_capacity(items.len());
    let mut coeff = Rational::one();
    let mut pending = items;
    pending.reverse();
    while let Some(item) = pending.pop() {
        match item {
            Expr::Mul(inner) => pending.extend(inner.into_iter().rev()),
            Expr::Num(q) => coeff *= q,
            Expr::Neg(inner) => {
                coeff = -coeff;
                pending.push(*inner);
            }
            t => flat.push(t),
        }
    }
    if coeff.is_zero() {
        return Expr::zero();
    }
    let body = match flat.len() {
        0 => return Expr::Num(coeff),
        1 => flat.pop().expect("one factor"),
        _ => Expr::Mul(flat),
    };
    if coeff.is_one() {
        body
    } else if coeff == -Rational::one() {
        Expr::Neg(Box::new(body))
    } else {
        match body {
            Expr::Mul(mut v) => {
                v.insert(0, Expr::Num(coeff));
                Expr::Mul(v)
            }
            b => Expr::Mul(vec![Expr::Num(coeff), b]),
        }
    }
}

pub(super) fn quotient(a: Expr, b: Expr) -> Expr {
    match (&a, &b) {
        (Expr::Num(p), _) if p.is_zero() => Expr::zero(),
        (_, Expr::Num(q)) if q.is_one() => a,
        (_, Expr::Num(q)) if !q.is_zero() => product(vec![Expr::Num(q.recip()), a]),
        _ => Expr::Div(Box::new(a), Box::new(b)),
    }
}

pub(super) fn power(base: Expr, exp: Expr) -> Expr {
    if let Expr::Num(e) = &exp {
        if e.is_zero() {
            return Expr::one();
        }
        if e.is_one() {
            return base;
        }
        if let Expr::Num(b) = &base {
            if b.is_one() {
                return Expr::one();
            }
            if e.is_integer() {
                if let Some(k) = e.to_integer().to_i32() {
                    if (k > 0 || !b.is_zero()) && k.unsigned_abs() <= 1024 {
                        let mag = crate::rational::pow(b, k.unsigned_abs());
                        return Expr::Num(if k < 0 { mag.recip() } else { mag });
                    }
                }
            }
        }
    }
    Expr::Pow(Box::new(base), Box::new(exp))
}

/// Folds only values that are exact rationals at zero argument.
pub(super) fn call(f: Func, arg: Expr) -> Expr {
    if let Expr::Num(q) = &arg {
        if q.is_zero() {
            match f {
                Func::Exp | Func::Cos | Func::Cosh => return Expr::one(),
                Func::Sin | Func::Tan | Func::Sinh => return Expr::zero(),
                Func::Ln => {}
            }
        }
        if q.is_one() && f == Func::Ln {
            return Expr::zero();
        }
    }
    Expr::Call(f, Box::new(arg))
}
