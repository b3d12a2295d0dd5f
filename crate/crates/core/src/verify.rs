//! Residual checks for piecewise solutions: the equation itself, and its
//! integral form
//!
//! ```text
//! y(x) = c + ∫_{x-1/2}^{x+1/2} y(s) ds,   c = y(0) - ∫_{-1/2}^{1/2} y(s) ds
//! ```
//!
//! which a solution with a jump at a knot fails even though every segment
//! satisfies the equation on its own.

use crate::poly::Poly;
use crate::quadrature::{Integrator, QuadError, QuadratureSpec};
use crate::rational::{self, Rational};
use crate::steps::{PiecewiseSolution, StepsError};
use num_traits::ToPrimitive;
use std::fmt::Write as _;
use thiserror::Error;

/// Points closer than this to a knot are left out of residual profiles.
pub const KNOT_EXCLUSION: f64 = 0.01;

#[derive(Debug, Error)]
pub enum VerifyError {
    #[error(transparent)]
    Steps(#[from] StepsError),
    #[error(transparent)]
    Quadrature(#[from] QuadError),
    #[error("[{a}, {b}] is not inside the covered interval [{lo}, {hi}]")]
    Window { a: f64, b: f64, lo: f64, hi: f64 },
    #[error("covered interval has length {0}, need at least 2 for a residual profile")]
    SpanTooSmall(f64),
    #[error("need at least 2 profile points (got {0})")]
    TooFewPoints(usize),
}

/// `L p - p'`; zero exactly when `p` solves the equation.
pub fn null_check_poly(p: &Poly) -> Poly {
    &p.central_l() - &p.derivative()
}

fn check_window(sol: &PiecewiseSolution, a: f64, b: f64) -> Result<(), VerifyError> {
    let (lo, hi) = sol.interval_f64();
    if a < lo || b > hi {
        return Err(VerifyError::Window { a, b, lo, hi });
    }
    Ok(())
}

/// `y'(x) - y(x+1/2) + y(x-1/2)`, each term taken from the segment owning its
/// argument. Exact when all three segments are polynomial.
pub fn dde_residual(sol: &PiecewiseSolution, x: f64) -> Result<f64, VerifyError> {
    check_window(sol, x - 0.5, x + 0.5)?;
    let (mid, right, left) = (sol.owner(x)?, sol.owner(x + 0.5)?, sol.owner(x - 0.5)?);
    if let (Some(pm), Some(pr), Some(pl), Some(q)) =
        (mid.poly(), right.poly(), left.poly(), rational::from_f64(x))
    {
        let half = rational::half();
        let r = pm.derivative().eval(&q) - pr.eval(&(&q + &half)) + pl.eval(&(&q - &half));
        return Ok(rational::to_f64(&r));
    }
    Ok(mid.eval_derivative(x)? - right.eval(x + 0.5)? + left.eval(x - 0.5)?)
}

/// `∫_a^b y`, one quadrature panel per segment piece.
pub fn integrate(sol: &PiecewiseSolution, a: f64, b: f64, q: &Integrator) -> Result<f64, VerifyError> {
    check_window(sol, a, b)?;
    let mut cuts = vec![a];
    let mut k = (2.0 * a).floor() as i64 + 1;
    while (k as f64) / 2.0 < b {
        if (k as f64) / 2.0 > a {
            cuts.push(k as f64 / 2.0);
        }
        k += 1;
    }
    cuts.push(b);
    let mut total = 0.0;
    for w in cuts.windows(2) {
        let (p, r) = (w[0], w[1]);
        let n = (p + r).floor() as i64;
        let n = n.clamp(sol.first_index(), sol.last_index());
        let seg = sol.segment(n).expect("clamped index");
        total += q.panel(|s| seg.eval(s).map_err(|e| e.to_string()), p, r)?;
    }
    Ok(total)
}

/// Integral-form residual at `x`, with the constant taken at `base`
/// (`base = 0` is the usual form).
pub fn integral_form_residual_at(
    sol: &PiecewiseSolution,
    x: f64,
    base: f64,
    q: &Integrator,
) -> Result<f64, VerifyError> {
    let c = sol.eval(base)? - integrate(sol, base - 0.5, base + 0.5, q)?;
    Ok(sol.eval(x)? - c - integrate(sol, x - 0.5, x + 0.5, q)?)
}

pub fn integral_form_residual(
    sol: &PiecewiseSolution,
    x: f64,
    spec: &QuadratureSpec,
) -> Result<f64, VerifyError> {
    integral_form_residual_at(sol, x, 0.0, &Integrator::new(*spec)?)
}

fn exact_integral(sol: &PiecewiseSolution, a: &Rational, b: &Rational) -> Option<Rational> {
    let two = rational::int(2);
    let first = (a * &two).floor().to_integer().to_i64()?;
    let last = (b * &two).ceil().to_integer().to_i64()? - 1;
    let mut total = Rational::from_integer(0.into());
    for n in first..=last {
        let seg = sol.segment(n.clamp(sol.first_index(), sol.last_index()))?;
        let (lo, hi) = seg.domain();
        let p = if &lo > a { lo } else { a.clone() };
        let r = if &hi < b { hi } else { b.clone() };
        if p < r {
            total += seg.poly()?.integrate(&p, &r);
        }
    }
    Some(total)
}

/// Exact integral-form residual for fully polynomial solutions.
pub fn integral_form_residual_exact(sol: &PiecewiseSolution, x: &Rational) -> Option<Rational> {
    let half = rational::half();
    let zero = rational::int(0);
    let at = |t: &Rational| {
        let n = (t * rational::int(2)).ceil().to_integer().to_i64()? - 1;
        sol.segment(n.max(sol.first_index()))?.poly().map(|p| p.eval(t))
    };
    let c = at(&zero)? - exact_integral(sol, &-half.clone(), &half)?;
    Some(at(x)? - c - exact_integral(sol, &(x - &half), &(x + &half))?)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileRow {
    pub x: f64,
    pub y: f64,
    pub dde_residual: f64,
    pub integral_residual: f64,
}

/// Residuals on a uniform grid over `[lo + 1/2, hi - 1/2]`, skipping points
/// within [`KNOT_EXCLUSION`] of a knot.
pub fn residual_profile(
    sol: &PiecewiseSolution,
    n_points: usize,
    spec: &QuadratureSpec,
) -> Result<Vec<ProfileRow>, VerifyError> {
    if n_points < 2 {
        return Err(VerifyError::TooFewPoints(n_points));
    }
    let (lo, hi) = sol.interval_f64();
    if hi - lo < 2.0 {
        return Err(VerifyError::SpanTooSmall(hi - lo));
    }
    let q = Integrator::new(*spec)?;
    let (a, b) = (lo + 0.5, hi - 0.5);
    let mut rows = Vec::with_capacity(n_points);
    for i in 0..n_points {
        let x = a + (b - a) * i as f64 / (n_points - 1) as f64;
        let near = (2.0 * x).round() / 2.0;
        if (x - near).abs() < KNOT_EXCLUSION {
            continue;
        }
        rows.push(ProfileRow {
            x,
            y: sol.eval(x)?,
            dde_residual: dde_residual(sol, x)?,
            integral_residual: integral_form_residual_at(sol, x, 0.0, &q)?,
        });
    }
    Ok(rows)
}

pub const CSV_HEADER: &str = "x,y,dde_residual,integral_residual";

/// 17 significant digits per value, so every float round-trips.
pub fn profile_csv(rows: &[ProfileRow]) -> String {
    let mut out = String::from(CSV_HEADER);
    out.push('\n');
    for r in rows {
        let _ = writeln!(
            out,
            "{:.16e},{:.16e},{:.16e},{:.16e}",
            r.x, r.y, r.dde_residual, r.integral_residual
        );
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProfileSummary {
    pub points: usize,
    pub max_dde: f64,
    pub max_integral: f64,
    /// `x` of the largest integral residual.
    pub worst_x: f64,
}

pub fn summarize(rows: &[ProfileRow]) -> ProfileSummary {
    let mut s = ProfileSummary {
        points: rows.len(),
        max_dde: 0.0,
        max_integral: 0.0,
        worst_x: f64::NAN,
    };
    for r in rows {
        s.max_dde = s.max_dde.max(r.dde_residual.abs());
        if r.integral_residual.abs() >= s.max_integral {
            s.max_integral = r.integral_residual.abs();
            s.worst_x = r.x;
        }
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::steps::{solve_ivp, InitialFunction, Order};

    fn solve(src: &str, span: usize, force: bool) -> PiecewiseSolution {
        let h = InitialFunction::parse(src, Order::Unbounded).unwrap();
        solve_ivp(&h, span, force).unwrap().solution
    }

    #[test]
    fn null_checks() {
        assert!(null_check_poly(&Poly::from_ints(&[7, -1, 3])).is_zero());
        assert_eq!(null_check_poly(&Poly::from_ints(&[0, 0, 0, 1])), Poly::constant(rational::ratio(1, 4)));
        assert_eq!(null_check_poly(&Poly::from_ints(&[0, 0, 0, 0, 1])), Poly::x());
    }

    #[test]
    fn quadratic_profile_is_clean() {
        let sol = solve("x^2", 3, false);
        let rows = residual_profile(&sol, 101, &QuadratureSpec::default()).unwrap();
        let s = summarize(&rows);
        assert_eq!(s.max_dde, 0.0);
        assert!(s.max_integral <= 1e-11);
    }

    #[test]
    fn forced_exp_fails_integral_form() {
        let sol = solve("exp(x)", 2, true);
        let r = integral_form_residual(&sol, 0.6, &QuadratureSpec::default()).unwrap();
        assert!(r.abs() > 1e-3, "{r}");
        assert!(dde_residual(&sol, 0.6).unwrap().abs() < 1e-12);
    }

    #[test]
    fn windows_and_sizes() {
        let sol = solve("x^2", 1, false);
        let spec = QuadratureSpec::default();
        assert!(matches!(integral_form_residual(&sol, 0.8, &spec), Err(VerifyError::Window { .. })));
        let small = PiecewiseSolution::from_initial(&InitialFunction::parse("x^2", Order::Unbounded).unwrap());
        assert!(matches!(residual_profile(&small, 11, &spec), Err(VerifyError::SpanTooSmall(_))));
        assert!(matches!(residual_profile(&sol, 1, &spec), Err(VerifyError::TooFewPoints(1))));
    }

    #[test]
    fn csv_layout() {
        let rows = [ProfileRow {
            x: 0.1,
            y: 1.0 / 3.0,
            dde_residual: 0.0,
            integral_residual: -1e-20,
        }];
        let csv = profile_csv(&rows);
        let mut lines = csv.lines();
        assert_eq!(lines.next(), Some(CSV_HEADER));
        let cells: Vec<f64> = lines.next().unwrap().split(',').map(|c| c.parse().unwrap()).collect();
        assert_eq!(cells, vec![0.1, 1.0 / 3.0, 0.0, -1e-20]);
    }
}
