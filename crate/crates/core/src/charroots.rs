//! Complex solutions of `sin w = w` and the exponential solutions they induce.
//!
//! `y = e^{izx}` solves the equation iff `z/2 = sin(z/2)`. We iterate in the
//! half variable `w = z/2`; with `z = a + bi` the real and imaginary parts
//! `e^{-bx} cos(ax)`, `e^{-bx} sin(ax)` are real solutions.

use crate::expr::{EvalError, Expr, Func};
pub use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Seeds (and iterates) closer than this to the origin are taken to be `w = 0`.
/// There `sin w - w ~ -w³/6` and Newton only creeps inward by a factor 2/3.
pub const GUARD_BAND: f64 = 1e-3;
pub const ROOT_TOL: f64 = 1e-12;
pub const DEDUP_RADIUS: f64 = 1e-6;
pub const SOLUTION_TOL: f64 = 1e-8;
const DERIVATIVE_FLOOR: f64 = 1e-14;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexRoot {
    pub w: Complex64,
    pub z: Complex64,
    pub residual: f64,
    pub iterations: usize,
    pub origin: Complex64,
}

impl ComplexRoot {
    fn at(w: Complex64, iterations: usize, origin: Complex64) -> Self {
        Self {
            w,
            z: w * 2.0,
            residual: residual(w),
            iterations,
            origin,
        }
    }

    pub fn is_trivial(&self) -> bool {
        self.w == Complex64::new(0.0, 0.0)
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NewtonError {
    #[error("tolerance must be positive and max_iter at least 1")]
    InvalidParameters,
    #[error("no convergence from seed {seed} after {iterations} iterations (at {last}, residual {residual:e})")]
    NoConvergence {
        seed: Complex64,
        iterations: usize,
        last: Complex64,
        residual: f64,
    },
    #[error("cos w - 1 underflowed at {at} (seed {seed}, iteration {iterations})")]
    DerivativeUnderflow {
        seed: Complex64,
        at: Complex64,
        iterations: usize,
    },
}

pub fn residual(w: Complex64) -> f64 {
    (w.sin() - w).norm()
}

/// Newton on `sin w - w`, accepting once `|sin w - w| <= tol`.
pub fn newton_root(seed: Complex64, tol: f64, max_iter: usize) -> Result<ComplexRoot, NewtonError> {
    if !(tol > 0.0) || max_iter == 0 {
        return Err(NewtonError::InvalidParameters);
    }
    let zero = Complex64::new(0.0, 0.0);
    let mut w = seed;
    for it in 0..=max_iter {
        if w.norm() < GUARD_BAND {
            return Ok(ComplexRoot::at(zero, it, seed));
        }
        let f = w.sin() - w;
        if f.norm() <= tol {
            return Ok(ComplexRoot::at(w, it, seed));
        }
        if it == max_iter {
            break;
        }
        let df = w.cos() - 1.0;
        if df.norm() < DERIVATIVE_FLOOR {
            return Err(NewtonError::DerivativeUnderflow {
                seed,
                at: w,
                iterations: it,
            });
        }
        w -= f / df;
        if !w.is_finite() {
            break;
        }
    }
    Err(NewtonError::NoConvergence {
        seed,
        iterations: max_iter,
        last: w,
        residual: residual(w),
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ScanBox {
    pub re: (f64, f64),
    pub im: (f64, f64),
}

impl ScanBox {
    pub fn new(re: (f64, f64), im: (f64, f64)) -> Self {
        Self { re, im }
    }

    pub fn contains(&self, w: Complex64) -> bool {
        let slack = 1e-9;
        w.re >= self.re.0 - slack
            && w.re <= self.re.1 + slack
            && w.im >= self.im.0 - slack
            && w.im <= self.im.1 + slack
    }

    fn node(&self, i: usize, j: usize, n: usize) -> Complex64 {
        let t = |k: usize, (lo, hi): (f64, f64)| lo + (hi - lo) * k as f64 / (n - 1) as f64;
        Complex64::new(t(i, self.re), t(j, self.im))
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScanConfig {
    pub grid_n: usize,
    pub tol: f64,
    pub max_iter: usize,
}

impl Default for ScanConfig {
    fn default() -> Self {
        Self {
            grid_n: 20,
            tol: ROOT_TOL,
            max_iter: 100,
        }
    }
}

/// Newton from every node of a `grid_n × grid_n` lattice; roots that land in
/// the box are merged within [`DEDUP_RADIUS`] and sorted by `|w|`.
pub fn scan_box(bx: ScanBox, cfg: ScanConfig) -> Vec<ComplexRoot> {
    assert!(cfg.grid_n >= 2, "grid needs at least two nodes per side");
    let n = cfg.grid_n;
    let mut found: Vec<ComplexRoot> = (0..n)
        .flat_map(|i| (0..n).map(move |j| (i, j)))
        .filter_map(|(i, j)| newton_root(bx.node(i, j, n), cfg.tol, cfg.max_iter).ok())
        .filter(|r| bx.contains(r.w))
        .collect();
    found.sort_by(|a, b| {
        (a.w.norm(), a.w.re, a.w.im, a.residual)
            .partial_cmp(&(b.w.norm(), b.w.re, b.w.im, b.residual))
            .expect("finite roots")
    });
    let mut out: Vec<ComplexRoot> = Vec::new();
    for r in found {
        match out.iter_mut().find(|k| (k.w - r.w).norm() <= DEDUP_RADIUS) {
            Some(k) if r.residual < k.residual => *k = r,
            Some(_) => {}
            None => out.push(r),
        }
    }
    out
}

/// `(a/2 - sin(a/2)cosh(b/2), b/2 - cos(a/2)sinh(b/2))`: zero iff `a + bi` is a root in `z`.
pub fn real_system_residual(a: f64, b: f64) -> (f64, f64) {
    let (ha, hb) = (a / 2.0, b / 2.0);
    (ha - ha.sin() * hb.cosh(), hb - ha.cos() * hb.sinh())
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExpSolutionPair {
    pub a: f64,
    pub b: f64,
    pub real_part: Expr,
    pub imag_part: Expr,
}

pub fn build_exp_solutions(root: &ComplexRoot) -> ExpSolutionPair {
    let (a, b) = (root.z.re, root.z.im);
    let scaled = |c: f64| Expr::Mul(vec![Expr::float(c), Expr::X]);
    let damping = Expr::call(Func::Exp, scaled(-b));
    let part = |f| Expr::Mul(vec![damping.clone(), Expr::call(f, scaled(a))]).simplify();
    ExpSolutionPair {
        a,
        b,
        real_part: part(Func::Cos),
        imag_part: part(Func::Sin),
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridResidual {
    /// `max |y(x+1/2) - y(x-1/2) - y'(x)|`.
    pub max_abs: f64,
    /// `max(1, max |y|)` over the grid and its half-shifts.
    pub scale: f64,
}

impl GridResidual {
    pub fn relative(&self) -> f64 {
        self.max_abs / self.scale
    }
}

pub fn dde_residual_grid(y: &Expr, grid: &[f64]) -> Result<GridResidual, EvalError> {
    let f = y.compile();
    let d = y.differentiate().compile();
    let mut out = GridResidual {
        max_abs: 0.0,
        scale: 1.0,
    };
    for &x in grid {
        let (p, m) = (f.eval(x + 0.5)?, f.eval(x - 0.5)?);
        let r = (p - m - d.eval(x)?).abs();
        out.max_abs = out.max_abs.max(r);
        out.scale = out.scale.max(p.abs()).max(m.abs()).max(f.eval(x)?.abs());
    }
    Ok(out)
}

/// `n` evenly spaced points on `[lo, hi]`.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| lo + (hi - lo) * i as f64 / (n - 1) as f64)
            .collect(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RootRecord {
    pub w: [f64; 2],
    pub z: [f64; 2],
    pub residual: f64,
    pub iterations: usize,
}

impl From<&ComplexRoot> for RootRecord {
    fn from(r: &ComplexRoot) -> Self {
        Self {
            w: [r.w.re, r.w.im],
            z: [r.z.re, r.z.im],
            residual: r.residual,
            iterations: r.iterations,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    // First nontrivial root in the upper half plane, 30-digit reference.
    const W1: Complex64 = Complex64::new(7.497676277776385, 2.768678282987322);

    #[test]
    fn trivial_seeds() {
        let r = newton_root(Complex64::new(0.0, 0.0), ROOT_TOL, 50).unwrap();
        assert!(r.is_trivial() && r.residual == 0.0);
        let r = newton_root(Complex64::new(0.001 - 1e-12, 0.0), ROOT_TOL, 50).unwrap();
        assert!(r.is_trivial());
        assert_eq!(r.iterations, 0);
    }

    #[test]
    fn first_nontrivial_root() {
        let r = newton_root(Complex64::new(7.5, 2.8), ROOT_TOL, 50).unwrap();
        assert!(r.residual <= ROOT_TOL);
        assert!((r.w - W1).norm() < 1e-12);
        assert_eq!(r.z, r.w * 2.0);
    }

    #[test]
    fn bad_parameters() {
        let s = Complex64::new(1.0, 1.0);
        assert_eq!(newton_root(s, 0.0, 5), Err(NewtonError::InvalidParameters));
        assert_eq!(newton_root(s, 1e-12, 0), Err(NewtonError::InvalidParameters));
    }

    #[test]
    fn underflow_is_distinct() {
        let seed = Complex64::new(2.0 * std::f64::consts::PI, 0.0);
        assert!(matches!(
            newton_root(seed, ROOT_TOL, 10),
            Err(NewtonError::DerivativeUnderflow { .. })
        ));
    }

    #[test]
    fn small_box_holds_only_the_origin() {
        let roots = scan_box(ScanBox::new((-0.5, 0.5), (-0.5, 0.5)), ScanConfig::default());
        assert_eq!(roots.len(), 1);
        assert!(roots[0].is_trivial());
    }

    #[test]
    fn box_around_first_root() {
        let cfg = ScanConfig {
            grid_n: 30,
            ..ScanConfig::default()
        };
        let roots = scan_box(ScanBox::new((7.0, 8.0), (2.0, 3.0)), cfg);
        assert_eq!(roots.len(), 1);
        assert!((roots[0].w - W1).norm() < 1e-12);
    }

    #[test]
    fn near_origin_pairs_collapse_to_trivial_root() {
        for (a, b) in [
            (-3.75626e-8, 2.25842e-9),
            (0.0, -4.79706e-8),
            (0.0, 4.00874e-8),
            (2.10292e-8, 4.04457e-9),
        ] {
            let r = newton_root(Complex64::new(a / 2.0, b / 2.0), ROOT_TOL, 50).unwrap();
            assert!(r.is_trivial());
        }
    }

    #[test]
    fn real_system_examples() {
        assert_eq!(real_system_residual(0.0, 0.0), (0.0, 0.0));
        let (u, v) = real_system_residual(std::f64::consts::PI, 0.0);
        assert!((u - (std::f64::consts::FRAC_PI_2 - 1.0)).abs() < 1e-15 && v == 0.0);
        let z = W1 * 2.0;
        let (u, v) = real_system_residual(z.re, z.im);
        assert!(u.abs() <= 1e-10 && v.abs() <= 1e-10);
    }

    #[test]
    fn exp_solutions() {
        let trivial = newton_root(Complex64::new(0.0, 0.0), ROOT_TOL, 5).unwrap();
        let p = build_exp_solutions(&trivial);
        assert_eq!((p.real_part.clone(), p.imag_part.clone()), (Expr::one(), Expr::zero()));
        let r = newton_root(Complex64::new(7.5, 2.8), ROOT_TOL, 50).unwrap();
        let p = build_exp_solutions(&r);
        let grid = linspace(-5.0, 5.0, 201);
        for y in [&p.real_part, &p.imag_part] {
            let res = dde_residual_grid(y, &grid).unwrap();
            assert!(res.relative() <= SOLUTION_TOL, "{res:?}");
        }
    }

    #[test]
    fn residual_grid_examples() {
        let grid = linspace(-3.0, 3.0, 61);
        let sq = dde_residual_grid(&crate::parse("x^2").unwrap(), &grid).unwrap();
        assert!(sq.relative() <= 1e-13);
        let cube = dde_residual_grid(&crate::parse("x^3").unwrap(), &grid).unwrap();
        assert!(cube.max_abs >= 0.25 - 1e-12);
    }
}
