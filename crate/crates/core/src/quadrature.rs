//! Panel quadrature: fixed-order Gauss-Legendre checked against adaptive Simpson.

use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum QuadMethod {
    GaussLegendre { order: usize },
    AdaptiveSimpson,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureSpec {
    pub method: QuadMethod,
    pub abs_tol: f64,
    pub max_depth: usize,
}

impl Default for QuadratureSpec {
    fn default() -> Self {
        Self {
            method: QuadMethod::GaussLegendre { order: 16 },
            abs_tol: 1e-12,
            max_depth: 40,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("invalid quadrature settings: {0}")]
    InvalidSpec(&'static str),
    #[error("adaptive Simpson exhausted depth {depth} on panel [{a}, {b}]")]
    DepthExhausted { a: f64, b: f64, depth: usize },
    #[error("Gauss-Legendre ({gauss:e}) and Simpson ({simpson:e}) disagree on panel [{a}, {b}]")]
    Disagreement {
        a: f64,
        b: f64,
        gauss: f64,
        simpson: f64,
    },
    #[error("integrand failed on panel [{a}, {b}]: {message}")]
    Integrand { a: f64, b: f64, message: String },
}

/// Nodes and weights on `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussRule {
    /// Roots of `P_n` by Newton from the Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1);
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        for i in 0..n.div_ceil(2) {
            let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 0.0;
            for _ in 0..100 {
                let (p, d) = legendre(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() < 1e-16 {
                    break;
                }
            }
            let (_, d) = legendre(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        Self { nodes, weights }
    }

    pub fn integrate<E>(&self, f: &mut impl FnMut(f64) -> Result<f64, E>, a: f64, b: f64) -> Result<f64, E> {
        let (c, r) = ((a + b) / 2.0, (b - a) / 2.0);
        let mut s = 0.0;
        for (x, w) in self.nodes.iter().zip(&self.weights) {
            s += w * f(c + r * x)?;
        }
        Ok(s * r)
    }
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    for k in 2..=n {
        let k = k as f64;
        let p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let n = n as f64;
    (p1, n * (x * p1 - p0) / (x * x - 1.0))
}

/// A prepared [`QuadratureSpec`].
#[derive(Debug, Clone)]
pub struct Integrator {
    spec: QuadratureSpec,
    rule: Option<GaussRule>,
}

impl Integrator {
    pub fn new(spec: QuadratureSpec) -> Result<Self, QuadError> {
        if !(spec.abs_tol > 0.0) {
            return Err(QuadError::InvalidSpec("abs_tol must be positive"));
        }
        if spec.max_depth == 0 {
            return Err(QuadError::InvalidSpec("max_depth must be at least 1"));
        }
        let rule = match spec.method {
            QuadMethod::GaussLegendre { order: 0 } => {
                return Err(QuadError::InvalidSpec("Gauss-Legendre order must be at least 1"))
            }
            QuadMethod::GaussLegendre { order } => Some(GaussRule::new(order)),
            QuadMethod::AdaptiveSimpson => None,
        };
        Ok(Self { spec, rule })
    }

    pub fn spec(&self) -> &QuadratureSpec {
        &self.spec
    }

    /// One smooth panel. Tolerances scale with `max(1, |I|)`.
    pub fn panel<F>(&self, f: F, a: f64, b: f64) -> Result<f64, QuadError>
    where
        F: Fn(f64) -> Result<f64, String>,
    {
        let wrap = |message| QuadError::Integrand { a, b, message };
        let mut g = |x: f64| f(x);
        if a == b {
            return Ok(0.0);
        }
        let simpson = self.simpson(&mut g, a, b)?;
        let Some(rule) = &self.rule else {
            return Ok(simpson);
        };
        let gauss = rule.integrate(&mut g, a, b).map_err(wrap)?;
        let tol = 10.0 * self.spec.abs_tol * gauss.abs().max(1.0);
        if (gauss - simpson).abs() > tol {
            return Err(QuadError::Disagreement {
                a,
                b,
                gauss,
                simpson,
            });
        }
        Ok(gauss)
    }

    fn simpson(
        &self,
        f: &mut impl FnMut(f64) -> Result<f64, String>,
        a: f64,
        b: f64,
    ) -> Result<f64, QuadError> {
        let wrap = |message| QuadError::Integrand { a, b, message };
        let m = (a + b) / 2.0;
        let (fa, fm, fb) = (f(a).map_err(wrap)?, f(m).map_err(wrap)?, f(b).map_err(wrap)?);
        let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
        let eps = self.spec.abs_tol * whole.abs().max(1.0);
        self.simpson_step(f, [a, m, b], [fa, fm, fb], whole, eps, 0)
            .map_err(|e| match e {
                QuadError::Integrand { message, .. } => QuadError::Integrand { a, b, message },
                other => other,
            })
    }

    fn simpson_step(
        &self,
        f: &mut impl FnMut(f64) -> Result<f64, String>,
        [a, m, b]: [f64; 3],
        [fa, fm, fb]: [f64; 3],
        whole: f64,
        eps: f64,
        depth: usize,
    ) -> Result<f64, QuadError> {
        let wrap = |message| QuadError::Integrand { a, b, message };
        let (lm, rm) = ((a + m) / 2.0, (m + b) / 2.0);
        let (flm, frm) = (f(lm).map_err(wrap)?, f(rm).map_err(wrap)?);
        let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
        let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
        let diff = left + right - whole;
        // Once the difference is at roundoff level further halving cannot help.
        let floor = 64.0 * f64::EPSILON * (left.abs() + right.abs());
        if diff.abs() <= 15.0 * eps || diff.abs() <= floor || lm <= a || rm >= b {
            return Ok(left + right + diff / 15.0);
        }
        if depth + 1 >= self.spec.max_depth {
            return Err(QuadError::DepthExhausted {
                a,
                b,
                depth: self.spec.max_depth,
            });
        }
        let l = self.simpson_step(f, [a, lm, m], [fa, flm, fm], left, eps / 2.0, depth + 1)?;
        let r = self.simpson_step(f, [m, rm, b], [fm, frm, fb], right, eps / 2.0, depth + 1)?;
        Ok(l + r)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss_rule_is_exact_to_degree_31() {
        let rule = GaussRule::new(16);
        assert!((rule.weights.iter().sum::<f64>() - 2.0).abs() < 1e-14);
        for k in 0..=31 {
            let got = rule
                .integrate(&mut |x: f64| Ok::<_, ()>(x.powi(k)), 0.0, 1.0)
                .unwrap();
            assert!((got - 1.0 / (k as f64 + 1.0)).abs() < 1e-14, "k = {k}");
        }
    }

    #[test]
    fn smooth_panel() {
        let q = Integrator::new(QuadratureSpec::default()).unwrap();
        let v = q.panel(|x| Ok(x.exp()), -0.5, 0.5).unwrap();
        assert!((v - (0.5f64.exp() - (-0.5f64).exp())).abs() < 1e-14);
        let s = Integrator::new(QuadratureSpec {
            method: QuadMethod::AdaptiveSimpson,
            ..QuadratureSpec::default()
        })
        .unwrap();
        assert!((s.panel(|x| Ok(x.cos()), 0.0, 1.0).unwrap() - 1f64.sin()).abs() < 1e-12);
    }

    #[test]
    fn shallow_depth_is_reported() {
        let q = Integrator::new(QuadratureSpec {
            max_depth: 2,
            ..QuadratureSpec::default()
        })
        .unwrap();
        assert!(matches!(
            q.panel(|x| Ok((40.0 * x).sin()), 0.0, 3.0),
            Err(QuadError::DepthExhausted { .. })
        ));
    }

    #[test]
    fn invalid_specs() {
        let bad = QuadratureSpec {
            abs_tol: 0.0,
            ..QuadratureSpec::default()
        };
        assert!(Integrator::new(bad).is_err());
    }
}
