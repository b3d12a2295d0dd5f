//! Segment formulas as polynomials in `D` applied to shifted copies of `h`.
//!
//! With `Φ, Ψ = (D ± √(D²+4))/2` the radical-free combinations
//! `G_n = (Φⁿ − Ψⁿ)/√(D²+4)` obey `G_{n+1} = D·G_n + G_{n−1}`. Writing
//! `z_n(x) = y_n(x + n/2)` turns the forward step into
//! `z_n = D z_{n−1} + z_{n−2}`, hence for `n ≥ 0`
//!
//! ```text
//! y_n(x)  = G_{n+1}(D) h(x − n/2) + G_n(D) h(x − n/2 − 1/2)
//! ```
//!
//! and the backward step is the same recurrence in `−D`, so for `n ≥ 1`
//!
//! ```text
//! y_{−n}(x) = G_{n−1}(−D) h(x + n/2) + G_n(−D) h(x + n/2 − 1/2)
//! ```

use crate::expr::Expr;
use crate::poly::Poly;
use crate::rational::{self, Rational};
use crate::steps::{InitialFunction, PiecewiseSolution, Provenance, Segment, StepsError};
use num_traits::Zero;
use serde::{Deserialize, Serialize};
use std::fmt;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ClosedFormError {
    #[error("segment {0} is the initial data itself")]
    InitialSegment(i64),
    #[error(transparent)]
    Steps(#[from] StepsError),
}

/// Polynomial in `D`; coefficient `i` multiplies the `i`-th derivative.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(transparent)]
pub struct OpPoly(pub Poly);

impl OpPoly {
    pub fn zero() -> Self {
        Self(Poly::zero())
    }

    pub fn one() -> Self {
        Self(Poly::one())
    }

    pub fn d() -> Self {
        Self(Poly::x())
    }

    pub fn as_poly(&self) -> &Poly {
        &self.0
    }

    pub fn degree(&self) -> Option<usize> {
        self.0.degree()
    }

    /// `g(D) -> g(−D)`.
    pub fn negate_d(&self) -> Self {
        Self(self.0.reflect())
    }

    /// `Σ c_i f^{(i)}`, kept as a sum of scaled derivatives.
    pub fn apply_expr(&self, f: &Expr) -> Expr {
        let mut terms = Vec::new();
        let mut d = f.simplify();
        for (i, c) in self.0.coeffs().iter().enumerate() {
            if i > 0 {
                d = d.differentiate();
            }
            if !c.is_zero() {
                terms.push(Expr::Mul(vec![Expr::Num(c.clone()), d.clone()]));
            }
        }
        Expr::Add(terms).simplify()
    }

    pub fn apply_poly(&self, f: &Poly) -> Poly {
        let mut out = Poly::zero();
        let mut d = f.clone();
        for (i, c) in self.0.coeffs().iter().enumerate() {
            if i > 0 {
                d = d.derivative();
            }
            out = &out + &d.scale(c);
        }
        out
    }
}

impl fmt::Display for OpPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let p = &self.0;
        if p.is_zero() {
            return f.write_str("0");
        }
        let mut first = true;
        for (i, c) in p.coeffs().iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let neg = c < &Rational::zero();
            let mag = if neg { -c.clone() } else { c.clone() };
            match (first, neg) {
                (true, true) => f.write_str("-")?,
                (false, true) => f.write_str(" - ")?,
                (false, false) => f.write_str(" + ")?,
                _ => {}
            }
            first = false;
            let unit = mag == rational::int(1);
            if !unit || i == 0 {
                write!(f, "{}", rational::to_text(&mag))?;
            }
            match i {
                0 => {}
                1 => f.write_str("D")?,
                _ => write!(f, "D^{i}")?,
            }
        }
        Ok(())
    }
}

/// `G_n` from the three-term recurrence.
pub fn fib_op_poly(n: usize) -> OpPoly {
    let (mut prev, mut cur) = (Poly::zero(), Poly::one());
    if n == 0 {
        return OpPoly(prev);
    }
    let d = Poly::x();
    for _ in 1..n {
        let next = &(&d * &cur) + &prev;
        prev = std::mem::replace(&mut cur, next);
    }
    OpPoly(cur)
}

/// `G_n` from `2^{1−n} Σ_k C(n, 2k+1) D^{n−2k−1} (D²+4)^k`.
pub fn fib_op_poly_explicit(n: usize) -> OpPoly {
    assert!(n >= 1, "explicit form starts at n = 1");
    let n32 = u32::try_from(n).expect("index fits in u32");
    let quad = Poly::from_ints(&[4, 0, 1]);
    let mut sum = Poly::zero();
    let mut quad_k = Poly::one();
    for k in 0..=(n - 1) / 2 {
        let c = Rational::from_integer(rational::binomial(n32, 2 * k as u32 + 1));
        let term = &Poly::monomial(c, n - 2 * k - 1) * &quad_k;
        sum = &sum + &term;
        quad_k = &quad_k * &quad;
    }
    OpPoly(sum.scale(&(rational::int(1) / rational::pow(&rational::int(2), n32 - 1))))
}

/// The two `(operator, shift)` pairs whose sum is `y_n`, the `y_0` term first.
fn terms(n: i64) -> [(OpPoly, Rational); 2] {
    let m = n.unsigned_abs() as usize;
    let shift = rational::ratio(n, 2);
    let half = rational::half();
    if n >= 0 {
        [
            (fib_op_poly(m + 1), -shift.clone()),
            (fib_op_poly(m), -shift - half),
        ]
    } else {
        [
            (fib_op_poly(m - 1).negate_d(), -shift.clone()),
            (fib_op_poly(m).negate_d(), -shift - half),
        ]
    }
}

/// Segment `n` (`n ∉ {−1, 0}`) straight from the operator closed form.
pub fn closed_segment(n: i64, h: &InitialFunction) -> Result<Segment, ClosedFormError> {
    if n == 0 || n == -1 {
        return Err(ClosedFormError::InitialSegment(n));
    }
    let [(g0, s0), (g1, s1)] = terms(n);
    let base = h.expr();
    let formula = Expr::Add(vec![
        g0.apply_expr(&base).shift(&s0),
        g1.apply_expr(&base).shift(&s1),
    ])
    .simplify();
    let poly = h
        .exact()
        .map(|p| &g0.apply_poly(p).shift(&s0) + &g1.apply_poly(p).shift(&s1));
    Ok(Segment::new(n, formula, poly))
}

/// Same layout as the stepwise solver (`-(span+1) ..= span`), every segment
/// from [`closed_segment`]. No admissibility check is made here.
pub fn closed_solution(h: &InitialFunction, span: usize) -> Result<PiecewiseSolution, ClosedFormError> {
    if span == 0 {
        return Err(StepsError::InvalidSpan(0).into());
    }
    let initial = PiecewiseSolution::from_initial(h);
    let mut segments = initial.segments().to_vec();
    let m = span as i64;
    for n in (-(m + 1)..=m).filter(|n| *n != 0 && *n != -1) {
        segments.push(closed_segment(n, h)?);
    }
    Ok(PiecewiseSolution::from_segments(segments, Provenance::ClosedForm)?)
}
