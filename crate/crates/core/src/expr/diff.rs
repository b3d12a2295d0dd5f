use super::simplify::{negate, power, product, quotient, sum};
use super::{Expr, Func};
use crate::rational::Rational;
use num_traits::One;

impl Expr {
    /// Symbolic `d/dx`, simplified.
    pub fn differentiate(&self) -> Expr {
        derive(self).simplify()
    }

    pub fn nth_derivative(&self, order: usize) -> Expr {
        (0..order).fold(self.simplify(), |e, _| e.differentiate())
    }
}

fn derive(e: &Expr) -> Expr {
    match e {
        Expr::Num(_) | Expr::Const(_) => Expr::zero(),
        Expr::X => Expr::one(),
        Expr::Neg(a) => negate(derive(a)),
        Expr::Add(v) => sum(v.iter().map(derive).collect()),
        Expr::Mul(v) => {
            let terms = (0..v.len())
                .map(|i| {
                    let mut factors = v.clone();
                    factors[i] = derive(&v[i]);
                    product(factors)
                })
                .collect();
            sum(terms)
        }
        Expr::Div(u, w) => {
            if w.is_constant() {
                return quotient(derive(u), (**w).clone());
            }
            let top = sum(vec![
                product(vec![derive(u), (**w).clone()]),
                negate(product(vec![(**u).clone(), derive(w)])),
            ]);
            quotient(top, power((**w).clone(), Expr::int(2)))
        }
        Expr::Pow(u, c) => {
            let lowered = match c.as_ref() {
                Expr::Num(q) => Expr::Num(q - Rational::one()),
                other => sum(vec![other.clone(), Expr::int(-1)]),
            };
            product(vec![
                (**c).clone(),
                power((**u).clone(), lowered),
                derive(u),
            ])
        }
        Expr::Call(f, u) => {
            let inner = derive(u);
            let u = (**u).clone();
            let outer = match f {
                Func::Exp => Expr::call(Func::Exp, u),
                Func::Ln => return quotient(inner, u),
                Func::Sin => Expr::call(Func::Cos, u),
                Func::Cos => negate(Expr::call(Func::Sin, u)),
                Func::Tan => {
                    return quotient(inner, power(Expr::call(Func::Cos, u), Expr::int(2)));
                }
                Func::Sinh => Expr::call(Func::Cosh, u),
                Func::Cosh => Expr::call(Func::Sinh, u),
            };
            product(vec![outer, inner])
        }
    }
}
