//! Exact rational helpers on top of `num_rational::BigRational`.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use std::str::FromStr;
use thiserror::Error;

/// Arbitrary-precision rational, always kept in lowest terms with a positive denominator.
pub type Rational = BigRational;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("invalid rational literal {0:?}")]
pub struct ParseRationalError(pub String);

pub fn int(n: i64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}

pub fn ratio(num: i64, den: i64) -> Rational {
    Rational::new(BigInt::from(num), BigInt::from(den))
}

/// `1/2`, used everywhere as the shift of the central difference.
pub fn half() -> Rational {
    ratio(1, 2)
}

/// Formats as `"num/den"`, or `"num"` when the denominator is one.
pub fn to_text(q: &Rational) -> String {
    if q.denom().is_one() {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Parses `"p"`, `"p/q"` or a plain decimal literal such as `"-0.25"` or `"1e-3"`.
pub fn from_text(s: &str) -> Result<Rational, ParseRationalError> {
    let err = || ParseRationalError(s.to_string());
    let t = s.trim();
    if let Some((n, d)) = t.split_once('/') {
        let n = BigInt::from_str(n.trim()).map_err(|_| err())?;
        let d = BigInt::from_str(d.trim()).map_err(|_| err())?;
        if d.is_zero() {
            return Err(err());
        }
        return Ok(Rational::new(n, d));
    }
    parse_decimal(t).ok_or_else(err)
}

/// Exact value of a decimal literal (`digits[.digits][e[+-]digits]`, optional sign).
pub fn parse_decimal(s: &str) -> Option<Rational> {
    let (neg, body) = match s.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, s.strip_prefix('+').unwrap_or(s)),
    };
    let (mantissa, exp) = match body.find(['e', 'E']) {
        Some(i) => (&body[..i], body[i + 1..].parse::<i64>().ok()?),
        None => (body, 0),
    };
    let (whole, frac) = mantissa.split_once('.').unwrap_or((mantissa, ""));
    if whole.is_empty() && frac.is_empty() {
        return None;
    }
    if !whole.bytes().chain(frac.bytes()).all(|b| b.is_ascii_digit()) {
        return None;
    }
    let digits = format!("{whole}{frac}");
    let mut value = Rational::from_integer(BigInt::from_str(&digits).ok()?);
    let scale = exp - frac.len() as i64;
    let ten = Rational::from_integer(BigInt::from(10));
    if scale >= 0 {
        value *= pow(&ten, scale as u32);
    } else {
        value /= pow(&ten, (-scale) as u32);
    }
    Some(if neg { -value } else { value })
}

pub fn pow(base: &Rational, exp: u32) -> Rational {
    let mut acc = Rational::one();
    for _ in 0..exp {
        acc *= base;
    }
    acc
}

pub fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    let k = k.min(n - k);
    let mut acc = BigInt::one();
    for i in 0..k {
        acc = acc * BigInt::from(n - i) / BigInt::from(i + 1);
    }
    acc
}

/// Correctly rounded conversion to `f64`.
pub fn to_f64(q: &Rational) -> f64 {
    q.to_f64().unwrap_or(if q.is_negative() {
        f64::NEG_INFINITY
    } else {
        f64::INFINITY
    })
}

/// The exact binary value of a finite double.
pub fn from_f64(x: f64) -> Option<Rational> {
    Rational::from_float(x)
}

/// Shortest decimal that round-trips to `x`, as an exact rational.
///
/// Used when a float enters an expression tree, so that the rendered
/// text stays short while evaluation reproduces `x` bit for bit.
pub fn from_f64_shortest(x: f64) -> Option<Rational> {
    if !x.is_finite() {
        return None;
    }
    parse_decimal(&format!("{x:e}"))
}

/// Renders a rational whose denominator has only factors 2 and 5 as an
/// exact decimal string. Returns `None` for other denominators.
pub fn to_decimal_text(q: &Rational) -> Option<String> {
    let mut den = q.denom().clone();
    let two = BigInt::from(2);
    let five = BigInt::from(5);
    let (mut twos, mut fives) = (0u32, 0u32);
    while (&den % &two).is_zero() {
        den /= &two;
        twos += 1;
    }
    while (&den % &five).is_zero() {
        den /= &five;
        fives += 1;
    }
    if !den.is_one() {
        return None;
    }
    let places = twos.max(fives);
    let scaled = q * Rational::from_integer(BigInt::from(10).pow(places));
    debug_assert!(scaled.is_integer());
    let digits = scaled.numer().abs().to_string();
    let sign = if q.is_negative() { "-" } else { "" };
    if places == 0 {
        return Some(format!("{sign}{digits}"));
    }
    let places = places as usize;
    let padded = if digits.len() <= places {
        format!("{}{}", "0".repeat(places - digits.len() + 1), digits)
    } else {
        digits
    };
    let (w, f) = padded.split_at(padded.len() - places);
    Some(format!("{sign}{w}.{f}"))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn text_forms() {
        assert_eq!(to_text(&ratio(2, 8)), "1/4");
        assert_eq!(to_text(&int(-3)), "-3");
        assert_eq!(from_text("6/-8").unwrap(), ratio(-3, 4));
        assert_eq!(from_text("0.25").unwrap(), ratio(1, 4));
        assert_eq!(from_text("-1.5e2").unwrap(), int(-150));
        assert_eq!(from_text("2.5E-1").unwrap(), ratio(1, 4));
        assert!(from_text("1/0").is_err());
        assert!(from_text("abc").is_err());
        assert!(from_text(".").is_err());
    }

    #[test]
    fn canonical_zero() {
        let z = ratio(0, -7);
        assert_eq!(z.numer(), &BigInt::zero());
        assert_eq!(z.denom(), &BigInt::one());
    }

    #[test]
    fn binomials() {
        assert_eq!(binomial(10, 5), BigInt::from(252));
        assert_eq!(binomial(9, 0), BigInt::one());
        assert_eq!(binomial(3, 4), BigInt::zero());
    }

    #[test]
    fn decimal_rendering() {
        assert_eq!(to_decimal_text(&ratio(1, 4)).unwrap(), "0.25");
        assert_eq!(to_decimal_text(&ratio(-3, 40)).unwrap(), "-0.075");
        assert_eq!(to_decimal_text(&int(12)).unwrap(), "12");
        assert!(to_decimal_text(&ratio(1, 3)).is_none());
    }

    #[test]
    fn shortest_float_round_trips() {
        for x in [0.1, -7.497676277776385, 2.0_f64.sqrt(), 1e-300, 6.02e23] {
            let q = from_f64_shortest(x).unwrap();
            assert_eq!(to_f64(&q), x);
        }
    }
}
