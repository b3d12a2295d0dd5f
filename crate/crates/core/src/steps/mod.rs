//! Initial-value problem on `[-1/2, 1/2]` solved by the method of steps.
//!
//! The initial function `h` is split into `y_{-1} = h|(-1/2, 0]` and
//! `y_0 = h|(0, 1/2]`. Segment `y_n` lives on `(n/2, (n+1)/2]` and is produced by
//!
//! ```text
//! forward:  y_n(x)  = y'_{n-1}(x - 1/2) + y_{n-2}(x - 1)
//! backward: y_n(x)  = y_{n+2}(x + 1)   - y'_{n+1}(x + 1/2)
//! ```
//!
//! A solve with span `m` runs `m` forward and `m` backward steps, so it covers
//! segments `-(m+1) ..= m`, i.e. `[-(m+1)/2, (m+1)/2]`. Continuity at every
//! knot `±j/2`, `j <= m`, requires the order-`j` compatibility condition.

mod export;
mod project;

pub use export::{KnotRecord, SegmentRecord, SolutionFile};
pub use project::project_admissible;

use crate::expr::{parse, Compiled, DerivativeTower, EvalError, Expr, ParseError};
use crate::poly::Poly;
use crate::rational::{self, Rational};
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use std::sync::Arc;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum StepsError {
    #[error(transparent)]
    Parse(#[from] ParseError),
    #[error("span must be at least 1 (got {0})")]
    InvalidSpan(usize),
    #[error("declared smoothness C^{declared} is too low for span {span}")]
    InsufficientOrder { declared: usize, span: usize },
    #[error("derivative of order {order} cannot be evaluated on [-1/2, 1/2]: {source}")]
    Evaluation { order: usize, source: EvalError },
    #[error("exact polynomial disagrees with the expression at x = {x}: {poly} vs {expr}")]
    InexactPolynomial { x: f64, poly: f64, expr: f64 },
    #[error("initial function is not admissible: {0}")]
    Inadmissible(Box<AdmissibilityReport>),
    #[error("segment {segment} is not differentiable where it is referenced: {source}")]
    NotDifferentiable { segment: i64, source: EvalError },
    #[error("segment {segment} failed to evaluate: {source}")]
    SegmentEval { segment: i64, source: EvalError },
    #[error("x = {x} is outside the covered interval [{lo}, {hi}]")]
    OutOfRange { x: f64, lo: f64, hi: f64 },
    #[error("invalid solution data: {0}")]
    Import(String),
}

/// Declared smoothness of the initial function.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Order {
    Finite(usize),
    Unbounded,
}

const GRID: usize = 33;

fn unit_grid() -> impl Iterator<Item = f64> {
    (0..GRID).map(|i| -0.5 + i as f64 / (GRID - 1) as f64)
}

/// `h` on `[-1/2, 1/2]`: its derivative tower, exact form when polynomial,
/// and declared smoothness.
#[derive(Debug, Clone)]
pub struct InitialFunction {
    tower: DerivativeTower,
    exact: Option<Poly>,
    order: Order,
}

impl InitialFunction {
    pub fn new(expr: Expr, order: Order) -> Result<Self, StepsError> {
        let exact = expr.to_polynomial();
        let tower = DerivativeTower::new(expr);
        let probe = match order {
            Order::Finite(k) => k,
            Order::Unbounded => 2,
        };
        for i in 0..=probe {
            let d = tower.get(i).compile();
            for x in unit_grid() {
                d.eval(x)
                    .map_err(|source| StepsError::Evaluation { order: i, source })?;
            }
        }
        if let Some(p) = &exact {
            let base = tower.base();
            for x in unit_grid() {
                let e = base.eval(x).expect("checked above");
                let q = p.eval_f64(x);
                if (e - q).abs() > 1e-12 * e.abs().max(1.0) {
                    return Err(StepsError::InexactPolynomial { x, poly: q, expr: e });
                }
            }
        }
        Ok(Self { tower, exact, order })
    }

    pub fn parse(source: &str, order: Order) -> Result<Self, StepsError> {
        Self::new(parse(source)?, order)
    }

    pub fn expr(&self) -> Arc<Expr> {
        self.tower.base()
    }

    pub fn derivative(&self, order: usize) -> Arc<Expr> {
        self.tower.get(order)
    }

    pub fn tower(&self) -> &DerivativeTower {
        &self.tower
    }

    pub fn exact(&self) -> Option<&Poly> {
        self.exact.as_ref()
    }

    pub fn order(&self) -> Order {
        self.order
    }
}

/// Signed amount by which `h` misses the order-`i` compatibility condition
/// `h^(i)(0) = h^(i-1)(1/2) - h^(i-1)(-1/2)`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Defect {
    pub order: usize,
    pub value: f64,
    #[serde(serialize_with = "opt_rational")]
    pub exact: Option<Rational>,
    pub passed: bool,
}

fn opt_rational<S: serde::Serializer>(q: &Option<Rational>, s: S) -> Result<S::Ok, S::Error> {
    match q {
        Some(q) => s.serialize_some(&rational::to_text(q)),
        None => s.serialize_none(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AdmissibilityReport {
    pub defects: Vec<Defect>,
}

impl AdmissibilityReport {
    pub fn admissible(&self) -> bool {
        self.defects.iter().all(|d| d.passed)
    }

    pub fn first_failure(&self) -> Option<&Defect> {
        self.defects.iter().find(|d| !d.passed)
    }
}

impl std::fmt::Display for AdmissibilityReport {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self.first_failure() {
            Some(d) => write!(f, "order {} defect {:.6e}", d.order, d.value),
            None => write!(f, "admissible to order {}", self.defects.len()),
        }
    }
}

/// Exact defects of orders `1..=k` for a polynomial `h`.
pub fn poly_defects(p: &Poly, k: usize) -> Vec<Rational> {
    let half = rational::half();
    let mut lower = p.clone();
    (1..=k)
        .map(|_| {
            let upper = lower.derivative();
            let d = upper.eval(&Rational::zero()) - lower.eval(&half) + lower.eval(&-half.clone());
            lower = upper;
            d
        })
        .collect()
}

/// Compatibility defects for orders `1..=k`. Polynomial data is checked
/// exactly; otherwise `|defect| <= 1e-10 * max(1, |h^(i)(0)|)`.
pub fn check_admissibility(
    h: &InitialFunction,
    k: usize,
) -> Result<AdmissibilityReport, StepsError> {
    let mut defects = Vec::with_capacity(k);
    if let Some(p) = h.exact() {
        for (i, d) in poly_defects(p, k).into_iter().enumerate() {
            defects.push(Defect {
                order: i + 1,
                value: rational::to_f64(&d),
                passed: d.is_zero(),
                exact: Some(d),
            });
        }
        return Ok(AdmissibilityReport { defects });
    }
    for i in 1..=k {
        let at = |order: usize, x: f64| {
            h.derivative(order)
                .eval(x)
                .map_err(|source| StepsError::Evaluation { order, source })
        };
        let top = at(i, 0.0)?;
        let value = top - at(i - 1, 0.5)? + at(i - 1, -0.5)?;
        defects.push(Defect {
            order: i,
            value,
            exact: None,
            passed: value.abs() <= 1e-10 * top.abs().max(1.0),
        });
    }
    Ok(AdmissibilityReport { defects })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Provenance {
    Stepwise,
    ClosedForm,
}

/// `y_n` on `(n/2, (n+1)/2]`.
#[derive(Debug, Clone)]
pub struct Segment {
    index: i64,
    formula: Expr,
    poly: Option<Poly>,
    value: Evaluator,
    slope: Evaluator,
}

#[derive(Debug, Clone)]
enum Evaluator {
    Poly(Vec<f64>),
    Expr(Compiled),
}

impl Evaluator {
    fn eval(&self, x: f64) -> Result<f64, EvalError> {
        match self {
            Evaluator::Poly(c) => Ok(c.iter().rev().fold(0.0, |acc, a| acc * x + a)),
            Evaluator::Expr(e) => e.eval(x),
        }
    }
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.index == other.index && self.formula == other.formula && self.poly == other.poly
    }
}

impl Segment {
    pub fn new(index: i64, formula: Expr, poly: Option<Poly>) -> Self {
        let (value, slope) = match &poly {
            Some(p) => (
                Evaluator::Poly(p.to_f64_coeffs()),
                Evaluator::Poly(p.derivative().to_f64_coeffs()),
            ),
            None => (
                Evaluator::Expr(formula.compile()),
                Evaluator::Expr(formula.differentiate().compile()),
            ),
        };
        Self {
            index,
            formula,
            poly,
            value,
            slope,
        }
    }

    pub fn index(&self) -> i64 {
        self.index
    }

    pub fn formula(&self) -> &Expr {
        &self.formula
    }

    pub fn poly(&self) -> Option<&Poly> {
        self.poly.as_ref()
    }

    /// Open left end, closed right end.
    pub fn domain(&self) -> (Rational, Rational) {
        (
            rational::ratio(self.index, 2),
            rational::ratio(self.index + 1, 2),
        )
    }

    /// Value of the segment formula at `x` (the formula extends past its domain).
    pub fn eval(&self, x: f64) -> Result<f64, StepsError> {
        self.value.eval(x).map_err(|source| StepsError::SegmentEval {
            segment: self.index,
            source,
        })
    }

    pub fn eval_derivative(&self, x: f64) -> Result<f64, StepsError> {
        self.slope.eval(x).map_err(|source| StepsError::SegmentEval {
            segment: self.index,
            source,
        })
    }

    fn check_differentiable(&self) -> Result<(), StepsError> {
        let d = self.formula.differentiate().compile();
        let (a, b) = self.domain();
        let (a, b) = (rational::to_f64(&a), rational::to_f64(&b));
        for t in [0.0, 0.25, 0.5, 0.75, 1.0] {
            d.eval(a + (b - a) * t)
                .map_err(|source| StepsError::NotDifferentiable {
                    segment: self.index,
                    source,
                })?;
        }
        Ok(())
    }
}

/// Which segment owns `x` under the `(n/2, (n+1)/2]` convention.
pub fn segment_index(x: f64) -> i64 {
    (2.0 * x).ceil() as i64 - 1
}

#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSolution {
    first: i64,
    segments: Vec<Segment>,
    provenance: Provenance,
}

impl PiecewiseSolution {
    /// Segments `-1` and `0`, both equal to `h`.
    pub fn from_initial(h: &InitialFunction) -> Self {
        let base = (*h.expr()).clone();
        let exact = h.exact().cloned();
        Self {
            first: -1,
            segments: vec![
                Segment::new(-1, base.clone(), exact.clone()),
                Segment::new(0, base, exact),
            ],
            provenance: Provenance::Stepwise,
        }
    }

    /// Assembles a solution from contiguous segments.
    pub fn from_segments(
        mut segments: Vec<Segment>,
        provenance: Provenance,
    ) -> Result<Self, StepsError> {
        segments.sort_by_key(Segment::index);
        let first = segments
            .first()
            .ok_or_else(|| StepsError::Import("no segments".into()))?
            .index;
        for (i, s) in segments.iter().enumerate() {
            if s.index != first + i as i64 {
                return Err(StepsError::Import(format!(
                    "segment indices are not contiguous near n = {}",
                    s.index
                )));
            }
        }
        if first > -1 || segments.last().map(Segment::index) < Some(0) {
            return Err(StepsError::Import(
                "segments -1 and 0 (the initial data) must be present".into(),
            ));
        }
        Ok(Self {
            first,
            segments,
            provenance,
        })
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    pub fn segments(&self) -> &[Segment] {
        &self.segments
    }

    pub fn first_index(&self) -> i64 {
        self.first
    }

    pub fn last_index(&self) -> i64 {
        self.first + self.segments.len() as i64 - 1
    }

    pub fn segment(&self, n: i64) -> Option<&Segment> {
        let i = n.checked_sub(self.first)?;
        usize::try_from(i).ok().and_then(|i| self.segments.get(i))
    }

    /// Closed interval `[first/2, (last+1)/2]` covered by the segments.
    pub fn interval(&self) -> (Rational, Rational) {
        (
            rational::ratio(self.first, 2),
            rational::ratio(self.last_index() + 1, 2),
        )
    }

    pub fn interval_f64(&self) -> (f64, f64) {
        let (a, b) = self.interval();
        (rational::to_f64(&a), rational::to_f64(&b))
    }

    /// Number of extension steps on each side when the solution is symmetric
    /// (`-(m+1) ..= m`), otherwise `None`.
    pub fn span(&self) -> Option<usize> {
        let m = self.last_index();
        (m >= 0 && self.first == -(m + 1)).then_some(m as usize)
    }

    pub fn knots(&self) -> impl Iterator<Item = i64> + '_ {
        self.first + 1..=self.last_index()
    }

    /// Appends segment `last + 1` from the forward recurrence.
    pub fn push_forward(&mut self) -> Result<(), StepsError> {
        let n = self.last_index() + 1;
        let prev = self.segment(n - 1).expect("contiguous");
        let prev2 = self
            .segment(n - 2)
            .ok_or_else(|| StepsError::Import(format!("segment {} missing", n - 2)))?;
        prev.check_differentiable()?;
        let half = rational::half();
        let formula = Expr::Add(vec![
            prev.formula.differentiate().shift(&-half.clone()),
            prev2.formula.shift(&-Rational::from_integer(1.into())),
        ])
        .simplify();
        let poly = match (&prev.poly, &prev2.poly) {
            (Some(a), Some(b)) => {
                Some(&a.derivative().shift(&-half) + &b.shift(&rational::int(-1)))
            }
            _ => None,
        };
        self.segments.push(Segment::new(n, formula, poly));
        Ok(())
    }

    /// Prepends segment `first - 1` from the backward recurrence.
    pub fn push_backward(&mut self) -> Result<(), StepsError> {
        let n = self.first - 1;
        let next = self.segment(n + 1).expect("contiguous");
        let next2 = self
            .segment(n + 2)
            .ok_or_else(|| StepsError::Import(format!("segment {} missing", n + 2)))?;
        next.check_differentiable()?;
        let half = rational::half();
        let formula = Expr::Add(vec![
            next2.formula.shift(&rational::int(1)),
            Expr::neg(next.formula.differentiate().shift(&half)),
        ])
        .simplify();
        let poly = match (&next.poly, &next2.poly) {
            (Some(a), Some(b)) => Some(&b.shift(&rational::int(1)) - &a.derivative().shift(&half)),
            _ => None,
        };
        self.segments.insert(0, Segment::new(n, formula, poly));
        self.first = n;
        Ok(())
    }

    pub fn extend_forward(&self) -> Result<Self, StepsError> {
        let mut out = self.clone();
        out.push_forward()?;
        Ok(out)
    }

    pub fn extend_backward(&self) -> Result<Self, StepsError> {
        let mut out = self.clone();
        out.push_backward()?;
        Ok(out)
    }

    /// Segment owning `x`; the left endpoint of the interval belongs to the
    /// first segment.
    pub fn owner(&self, x: f64) -> Result<&Segment, StepsError> {
        let (lo, hi) = self.interval_f64();
        if !(lo..=hi).contains(&x) {
            return Err(StepsError::OutOfRange { x, lo, hi });
        }
        let n = segment_index(x).max(self.first);
        Ok(self.segment(n).expect("inside interval"))
    }

    pub fn eval(&self, x: f64) -> Result<f64, StepsError> {
        self.owner(x)?.eval(x)
    }

    pub fn eval_derivative(&self, x: f64) -> Result<f64, StepsError> {
        self.owner(x)?.eval_derivative(x)
    }

    /// Jumps `right - left` of value and first derivative at every interior knot.
    pub fn knot_diagnostics(&self) -> Result<Vec<KnotJump>, StepsError> {
        self.knots()
            .map(|n| {
                let left = self.segment(n - 1).expect("contiguous");
                let right = self.segment(n).expect("contiguous");
                let at = rational::ratio(n, 2);
                let t = rational::to_f64(&at);
                let exact = match (&left.poly, &right.poly) {
                    (Some(l), Some(r)) => Some((
                        r.eval(&at) - l.eval(&at),
                        r.derivative().eval(&at) - l.derivative().eval(&at),
                    )),
                    _ => None,
                };
                let (value_jump, derivative_jump) = match &exact {
                    Some((v, d)) => (rational::to_f64(v), rational::to_f64(d)),
                    None => (
                        right.eval(t)? - left.eval(t)?,
                        right.eval_derivative(t)? - left.eval_derivative(t)?,
                    ),
                };
                Ok(KnotJump {
                    knot: at,
                    value_jump,
                    derivative_jump,
                    exact_value_jump: exact.as_ref().map(|e| e.0.clone()),
                    exact_derivative_jump: exact.map(|e| e.1),
                })
            })
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KnotJump {
    pub knot: Rational,
    pub value_jump: f64,
    pub derivative_jump: f64,
    pub exact_value_jump: Option<Rational>,
    pub exact_derivative_jump: Option<Rational>,
}

impl KnotJump {
    pub fn knot_f64(&self) -> f64 {
        rational::to_f64(&self.knot)
    }

    pub fn knot_index(&self) -> i64 {
        (&self.knot * rational::int(2))
            .to_integer()
            .to_i64()
            .expect("small knot")
    }
}

#[derive(Debug, Clone)]
pub struct IvpSolution {
    pub solution: PiecewiseSolution,
    pub admissibility: AdmissibilityReport,
    /// Admissibility failed and the caller asked to continue anyway.
    pub forced: bool,
}

/// Number of compatibility conditions checked before solving: the declared
/// order, or `span + 1` for `C^∞` data.
pub fn required_order(order: Order, span: usize) -> Result<usize, StepsError> {
    match order {
        Order::Finite(k) if k < span => Err(StepsError::InsufficientOrder { declared: k, span }),
        Order::Finite(k) => Ok(k),
        Order::Unbounded => Ok(span + 1),
    }
}

/// Solves on `[-(span+1)/2, (span+1)/2]` by alternating forward and backward
/// steps. Inadmissible data is an error unless `force` is set.
pub fn solve_ivp(
    h: &InitialFunction,
    span: usize,
    force: bool,
) -> Result<IvpSolution, StepsError> {
    if span == 0 {
        return Err(StepsError::InvalidSpan(span));
    }
    let order = required_order(h.order(), span)?;
    let report = check_admissibility(h, order)?;
    let forced = !report.admissible();
    if forced && !force {
        return Err(StepsError::Inadmissible(Box::new(report)));
    }
    let mut solution = PiecewiseSolution::from_initial(h);
    for _ in 0..span {
        solution.push_forward()?;
        solution.push_backward()?;
    }
    Ok(IvpSolution {
        solution,
        admissibility: report,
        forced,
    })
}
