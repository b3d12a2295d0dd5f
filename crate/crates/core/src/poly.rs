//! Dense univariate polynomials over exact rationals, and the shift/difference
//! operator calculus acting on them.
//!
//! Every operator here is exact: `E^h`, `Δ`, `∇`, the central difference
//! `L = E^{1/2} - E^{-1/2}` and `D` map polynomials to polynomials, so all the
//! operator identities can be checked with `==`.

use crate::rational::{self, Rational};
use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PolyError {
    #[error("S_n is only defined here for n >= 1 (got n = {0})")]
    SnDomain(u32),
    #[error("bad coefficient at index {index}: {source}")]
    Coefficient {
        index: usize,
        source: rational::ParseRationalError,
    },
}

/// Polynomial with coefficient `i` multiplying `x^i`. The coefficient list never
/// ends in a zero; the zero polynomial has no coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::constant(Rational::one())
    }

    pub fn constant(c: Rational) -> Self {
        Self::from_coeffs(vec![c])
    }

    /// The identity polynomial `x`.
    pub fn x() -> Self {
        Self::monomial(Rational::one(), 1)
    }

    pub fn monomial(c: Rational, power: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); power + 1];
        coeffs[power] = c;
        Self::from_coeffs(coeffs)
    }

    pub fn from_coeffs(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(Zero::is_zero) {
            coeffs.pop();
        }
        Self { coeffs }
    }

    pub fn from_ints(coeffs: &[i64]) -> Self {
        Self::from_coeffs(coeffs.iter().map(|&c| rational::int(c)).collect())
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, i: usize) -> Rational {
        self.coeffs.get(i).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Option<&Rational> {
        self.coeffs.last()
    }

    pub fn scale(&self, c: &Rational) -> Self {
        Self::from_coeffs(self.coeffs.iter().map(|a| a * c).collect())
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        self.coeffs
            .iter()
            .rev()
            .fold(Rational::zero(), |acc, c| acc * x + c)
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs
            .iter()
            .rev()
            .fold(0.0, |acc, c| acc * x + rational::to_f64(c))
    }

    /// `p(x) -> p(x + h)`, the shift operator `E^h`.
    pub fn shift(&self, h: &Rational) -> Self {
        if h.is_zero() {
            return self.clone();
        }
        // In-place Taylor shift: repeated synthetic division by (x - h).
        let mut c = self.coeffs.clone();
        let n = c.len();
        for i in 0..n {
            for j in (i..n.saturating_sub(1)).rev() {
                let carry = &c[j + 1] * h;
                c[j] += carry;
            }
        }
        Self::from_coeffs(c)
    }

    pub fn derivative(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(i, c)| c * rational::int(i as i64))
                .collect(),
        )
    }

    pub fn nth_derivative(&self, order: usize) -> Self {
        (0..order).fold(self.clone(), |p, _| p.derivative())
    }

    /// Antiderivative vanishing at zero.
    pub fn antiderivative(&self) -> Self {
        let mut coeffs = Vec::with_capacity(self.coeffs.len() + 1);
        coeffs.push(Rational::zero());
        for (i, c) in self.coeffs.iter().enumerate() {
            coeffs.push(c / rational::int(i as i64 + 1));
        }
        Self::from_coeffs(coeffs)
    }

    /// Exact `∫_a^b p(s) ds`.
    pub fn integrate(&self, a: &Rational, b: &Rational) -> Rational {
        let anti = self.antiderivative();
        anti.eval(b) - anti.eval(a)
    }

    /// `L p(x) = p(x + 1/2) - p(x - 1/2)`.
    pub fn central_l(&self) -> Self {
        let h = rational::half();
        &self.shift(&h) - &self.shift(&-h)
    }

    /// `Δ p(x) = p(x + 1) - p(x)`.
    pub fn forward_diff(&self) -> Self {
        &self.shift(&Rational::one()) - self
    }

    /// `∇ p(x) = p(x) - p(x - 1)`.
    pub fn backward_diff(&self) -> Self {
        self - &self.shift(&-Rational::one())
    }

    /// `p(-x)`.
    pub fn reflect(&self) -> Self {
        Self::from_coeffs(
            self.coeffs
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 1 { -c } else { c.clone() })
                .collect(),
        )
    }

    /// Only even powers present. The zero polynomial is both even and odd.
    pub fn is_even(&self) -> bool {
        self.coeffs.iter().skip(1).step_by(2).all(Zero::is_zero)
    }

    pub fn is_odd(&self) -> bool {
        self.coeffs.iter().step_by(2).all(Zero::is_zero)
    }

    pub fn to_f64_coeffs(&self) -> Vec<f64> {
        self.coeffs.iter().map(rational::to_f64).collect()
    }

    pub fn to_text_coeffs(&self) -> Vec<String> {
        self.coeffs.iter().map(rational::to_text).collect()
    }

    pub fn from_text_coeffs<S: AsRef<str>>(items: &[S]) -> Result<Self, PolyError> {
        items
            .iter()
            .enumerate()
            .map(|(index, s)| {
                rational::from_text(s.as_ref())
                    .map_err(|source| PolyError::Coefficient { index, source })
            })
            .collect::<Result<Vec<_>, _>>()
            .map(Self::from_coeffs)
    }
}

/// `S_n(x) = L x^n = (x + 1/2)^n - (x - 1/2)^n`, built term by term from the
/// binomial expansion: the coefficient of `x^k` is
/// `C(n, k) [(1/2)^(n-k) - (-1/2)^(n-k)]`.
pub fn s_n(n: u32) -> Result<Poly, PolyError> {
    if n == 0 {
        return Err(PolyError::SnDomain(n));
    }
    let half = rational::half();
    let coeffs = (0..=n)
        .map(|k| {
            let gap = n - k;
            let plus = rational::pow(&half, gap);
            let minus = rational::pow(&-half.clone(), gap);
            Rational::from_integer(rational::binomial(n, k)) * (plus - minus)
        })
        .collect();
    Ok(Poly::from_coeffs(coeffs))
}

/// `S_{2n}` as printed in closed form: `Σ_{k=1}^{n} 2^{2k-2n} C(2n, 2k-1) x^{2k-1}`.
pub fn s_even_printed(n: u32) -> Poly {
    let mut coeffs = vec![Rational::zero(); 2 * n as usize];
    for k in 1..=n {
        let c = Rational::from_integer(rational::binomial(2 * n, 2 * k - 1))
            * pow2(2 * k as i64 - 2 * n as i64);
        coeffs[(2 * k - 1) as usize] = c;
    }
    Poly::from_coeffs(coeffs)
}

/// `S_{2n-1}` as printed in closed form: `Σ_{k=0}^{n} 2^{2k-2n} C(2n-1, 2k) x^{2k}`.
/// Its power of two is off by a factor 4 against direct expansion.
pub fn s_odd_printed(n: u32) -> Poly {
    let mut coeffs = vec![Rational::zero(); 2 * n as usize + 1];
    for k in 0..=n {
        let c = Rational::from_integer(rational::binomial(2 * n - 1, 2 * k))
            * pow2(2 * k as i64 - 2 * n as i64);
        coeffs[2 * k as usize] = c;
    }
    Poly::from_coeffs(coeffs)
}

fn pow2(e: i64) -> Rational {
    let two = rational::int(2);
    if e >= 0 {
        rational::pow(&two, e as u32)
    } else {
        Rational::one() / rational::pow(&two, (-e) as u32)
    }
}

impl Add for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl Sub for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::from_coeffs((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl Mul for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut out = vec![Rational::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        Poly::from_coeffs(out)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::from_coeffs(self.coeffs.iter().map(|c| -c).collect())
    }
}

macro_rules! forward_owned {
    ($tr:ident, $m:ident) => {
        impl $tr for Poly {
            type Output = Poly;
            fn $m(self, rhs: Poly) -> Poly {
                (&self).$m(&rhs)
            }
        }
    };
}
forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl fmt::Display for Poly {
    /// Ascending powers, e.g. `1/4 + 3x^2` or `(3/8)x + 5x^3 + 6x^5`.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let mag = c.abs();
            match (first, c.is_negative()) {
                (true, true) => write!(f, "-")?,
                (true, false) => {}
                (false, true) => write!(f, " - ")?,
                (false, false) => write!(f, " + ")?,
            }
            first = false;
            let var = match k {
                0 => String::new(),
                1 => "x".to_string(),
                _ => format!("x^{k}"),
            };
            if k == 0 {
                write!(f, "{}", rational::to_text(&mag))?;
            } else if mag.is_one() {
                write!(f, "{var}")?;
            } else if mag.is_integer() {
                write!(f, "{}{var}", mag.numer())?;
            } else {
                write!(f, "({}){var}", rational::to_text(&mag))?;
            }
        }
        if first {
            write!(f, "0")?;
        }
        Ok(())
    }
}

impl Serialize for Poly {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        self.to_text_coeffs().serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for Poly {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let items = Vec::<String>::deserialize(deserializer)?;
        Poly::from_text_coeffs(&items).map_err(serde::de::Error::custom)
    }
}

impl From<i64> for Poly {
    fn from(c: i64) -> Self {
        Self::constant(rational::int(c))
    }
}

impl From<BigInt> for Poly {
    fn from(c: BigInt) -> Self {
        Self::constant(Rational::from_integer(c))
    }
}
