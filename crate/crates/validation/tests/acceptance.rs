//! Acceptance criteria. One line per criterion; nonzero exit if any fails.
//! Every tolerance, count and time limit below is part of the criterion.

use dde_core::charroots::{
    build_exp_solutions, dde_residual_grid, linspace, newton_root, scan_box, Complex64, ScanBox,
    ScanConfig, ROOT_TOL,
};
use dde_core::closedform::{closed_segment, fib_op_poly, fib_op_poly_explicit};
use dde_core::poly::{s_n, Poly};
use dde_core::quadrature::{Integrator, QuadratureSpec};
use dde_core::rational::{self, Rational};
use dde_core::steps::{
    check_admissibility, project_admissible, solve_ivp, InitialFunction, Order, StepsError,
};
use dde_core::triangular::{assemble_triangular, assignment_from_poly, Parity};
use dde_core::verify::{dde_residual, integral_form_residual_at, null_check_poly};
use dde_core::Expr;
use dde_validation::{poly_up_to, rng};
use num_traits::Zero;
use std::time::{Duration, Instant};

type Outcome = (bool, String);

fn within(start: Instant, limit: Duration) -> (bool, String) {
    let t = start.elapsed();
    (t < limit, format!("{:.3}s of {}s", t.as_secs_f64(), limit.as_secs()))
}

fn table_reproduction() -> Outcome {
    let start = Instant::now();
    let out = dde_cli::run(["dde", "--json", "sn-table", "10", "--compare-paper"]);
    let (fast, time) = within(start, Duration::from_secs(1));
    let doc: serde_json::Value = match serde_json::from_str(&out.stdout) {
        Ok(v) => v,
        Err(e) => return (false, format!("unreadable output: {e}")),
    };
    let rows_ok = (1..=10u32).all(|m| {
        let want = serde_json::to_value(s_n(m).unwrap()).unwrap();
        doc["result"]["rows"][(m - 1) as usize]["coeffs"] == want
    });
    let found = doc["result"]["discrepancies"].as_array().cloned().unwrap_or_default();
    let expected = serde_json::json!([{ "m": 9, "power": 0, "printed": "1/128", "computed": "1/256" }]);
    let listing: Vec<String> = found
        .iter()
        .map(|d| format!("m={} x^{} {} vs {}", d["m"], d["power"], d["printed"], d["computed"]))
        .collect();
    (
        out.code == 0 && rows_ok && fast && serde_json::Value::Array(found.clone()) == expected,
        format!(
            "{} discrepancies [{}] (expected exactly m=9 x^0), rows exact: {rows_ok}, {time}",
            found.len(),
            listing.join("; ")
        ),
    )
}

fn null_space() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(2);
    let zeros = (0..200)
        .filter(|_| null_check_poly(&poly_up_to(&mut rng, 2, 1_000_000)).is_zero())
        .count();
    let monomials = (3..=10u32).all(|n| {
        let want = &s_n(n).unwrap() - &Poly::monomial(rational::int(n as i64), n as usize - 1);
        !want.is_zero() && null_check_poly(&Poly::monomial(rational::int(1), n as usize)) == want
    });
    let (fast, time) = within(start, Duration::from_secs(1));
    (
        zeros == 200 && monomials && fast,
        format!("{zeros}/200 quadratics annihilated, x^3..x^10 defects exact: {monomials}, {time}"),
    )
}

fn operator_identities() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(3);
    let half = rational::half();
    let ok = (0..500)
        .filter(|_| {
            let p = poly_up_to(&mut rng, 12, 1000);
            let l = p.central_l();
            let (fwd, bwd) = (p.forward_diff(), p.backward_diff());
            l.shift(&-half.clone()) == bwd
                && l.shift(&half) == fwd
                && l.central_l() == fwd.backward_diff()
                && l.central_l() == &fwd - &bwd
        })
        .count();
    let (fast, time) = within(start, Duration::from_secs(5));
    (ok == 500 && fast, format!("{ok}/500 polynomials satisfy all four identities, {time}"))
}

fn admissibility_gate() -> Outcome {
    let e = InitialFunction::parse("exp(x)", Order::Finite(1)).unwrap();
    let report = check_admissibility(&e, 1).unwrap();
    let d = report.defects[0].value;
    let rejected = matches!(
        solve_ivp(&e, 1, false),
        Err(StepsError::Inadmissible(r)) if r.first_failure().map(|f| f.order) == Some(1)
    );
    let close = (d - -0.0421906104).abs() <= 1e-9;
    let q = InitialFunction::parse("x^2", Order::Finite(8)).unwrap();
    let qr = check_admissibility(&q, 8).unwrap();
    let exact_zero = qr.defects.len() == 8
        && qr
            .defects
            .iter()
            .all(|d| d.passed && d.exact.as_ref().is_some_and(Zero::is_zero));
    (
        rejected && close && exact_zero,
        format!("exp defect {d:.10e} rejected at order 1: {rejected}; x^2 exact zero through order 8: {exact_zero}"),
    )
}

fn forced_exp_extension() -> Outcome {
    let h = InitialFunction::parse("exp(x)", Order::Unbounded).unwrap();
    let sol = solve_ivp(&h, 1, true).unwrap().solution;
    let seg = sol.segment(1).unwrap();
    let c = (-1.0f64).exp() + (-0.5f64).exp();
    let worst = (1..=50)
        .map(|i| {
            let x = 0.5 + 0.5 * i as f64 / 50.0;
            let want = x.exp() * c;
            ((seg.eval(x).unwrap() - want) / want).abs()
        })
        .fold(0.0, f64::max);
    (worst <= 1e-12, format!("segment 1 = {}, max relative error {worst:.2e} on 50 points", seg.formula()))
}

fn method_of_steps_residual() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(6);
    let integ = Integrator::new(QuadratureSpec::default()).unwrap();
    let points: Vec<f64> = (0..25).map(|i| -2.0 + 4.0 * (i as f64 + 0.5) / 25.0).collect();
    let (mut exact_ok, mut worst, mut max_deg) = (0, 0.0f64, 0);
    for _ in 0..30 {
        let raw = poly_up_to(&mut rng, 6, 100);
        let p = project_admissible(&raw, 6);
        max_deg = max_deg.max(p.degree().unwrap_or(0));
        let h = InitialFunction::new(Expr::from_poly(&p), Order::Finite(6)).unwrap();
        let sol = solve_ivp(&h, 4, false).unwrap().solution;
        if points.iter().all(|&x| dde_residual(&sol, x).unwrap() == 0.0)
            && sol.segments().iter().all(|s| s.poly().is_some())
        {
            exact_ok += 1;
        }
        for &x in &points {
            worst = worst.max(integral_form_residual_at(&sol, x, 0.0, &integ).unwrap().abs());
        }
    }
    let (fast, time) = within(start, Duration::from_secs(30));
    (
        exact_ok == 30 && worst <= 1e-10 && fast,
        format!(
            "{exact_ok}/30 exact-zero residuals, max |integral residual| {worst:.2e}, projected degree <= {max_deg}, {time}"
        ),
    )
}

const BATTERY: [&str; 6] = [
    "x^2",
    "x^3",
    "x^4 - x",
    "x^5 + 2*x^2 - 1",
    "x^6 - 3*x^4 + x",
    "7*x^3 - x/4 + 1/2",
];

fn closed_form_equivalence() -> Outcome {
    let fib = (1..=15).all(|n| fib_op_poly(n) == fib_op_poly_explicit(n));
    let mut checked = 0;
    let mut equal = 0;
    for src in BATTERY {
        let h = InitialFunction::parse(src, Order::Unbounded).unwrap();
        let step = solve_ivp(&h, 4, true).unwrap().solution;
        for n in (-4i64..=4).filter(|n| *n != 0 && *n != -1) {
            checked += 1;
            if closed_segment(n, &h).unwrap().poly() == step.segment(n).unwrap().poly() {
                equal += 1;
            }
        }
    }
    // The sign between the two terms is pinned by the first forward step.
    let e = InitialFunction::parse("exp(x)", Order::Unbounded).unwrap();
    let step = solve_ivp(&e, 1, true).unwrap().solution;
    let base = [1, -2].iter().all(|&n| {
        closed_segment(n, &e).unwrap().formula() == step.segment(n).unwrap().formula()
    });
    (
        fib && equal == checked && base,
        format!("G_n recurrence = binomial sum for n<=15: {fib}; {equal}/{checked} battery segments equal; y_1, y_-2 structural: {base}"),
    )
}

fn characteristic_roots() -> Outcome {
    let start = Instant::now();
    let scan = |bx: ScanBox, n| {
        scan_box(
            bx,
            ScanConfig {
                grid_n: n,
                ..ScanConfig::default()
            },
        )
    };
    let small = scan(ScanBox::new((-0.5, 0.5), (-0.5, 0.5)), 20);
    let small_ok = small.len() == 1 && small[0].is_trivial();
    let target = ScanBox::new((7.0, 8.0), (2.0, 3.0));
    let (r30, r40, r60) = (scan(target, 30), scan(target, 40), scan(target, 60));
    let single = r30.len() == 1 && r40.len() == 1 && r60.len() == 1;
    let mut detail = format!("small box {} root(s)", small.len());
    let mut ok = small_ok && single;
    if single {
        let r = r30[0];
        let stable = (r40[0].w - r60[0].w).norm() <= 1e-9 && (r30[0].w - r40[0].w).norm() <= 1e-9;
        let pair = build_exp_solutions(&r);
        let grid = linspace(-5.0, 5.0, 201);
        let re = dde_residual_grid(&pair.real_part, &grid).unwrap().relative();
        let im = dde_residual_grid(&pair.imag_part, &grid).unwrap().relative();
        ok &= r.residual <= ROOT_TOL && stable && re <= 1e-8 && im <= 1e-8;
        detail += &format!(
            "; w = {:.12} + {:.12}i, |sin w - w| {:.1e}, grid-stable {stable}, solution residuals {re:.1e} {im:.1e}",
            r.w.re, r.w.im, r.residual
        );
    } else {
        detail += &format!("; target box counts {} {} {}", r30.len(), r40.len(), r60.len());
    }
    let listed = [
        (-3.75626e-8, 2.25842e-9),
        (0.0, -4.79706e-8),
        (0.0, 0.0),
        (0.0, 4.00874e-8),
        (2.10292e-8, 4.04457e-9),
    ];
    let collapse = listed.iter().all(|&(a, b)| {
        let w = Complex64::new(a, b) / 2.0;
        w.norm() < 1e-7 && newton_root(w, ROOT_TOL, 50).is_ok_and(|r| r.is_trivial())
    });
    let (fast, time) = within(start, Duration::from_secs(10));
    ok &= collapse && fast;
    (ok, format!("{detail}; five listed pairs collapse to 0: {collapse}; {time}"))
}

fn parity_suite() -> Outcome {
    let start = Instant::now();
    let mut rng = rng(9);
    let mut ok = 0;
    for _ in 0..500 {
        let p = poly_up_to(&mut rng, 12, 1000);
        let even = Poly::from_coeffs(
            p.coeffs()
                .iter()
                .enumerate()
                .map(|(i, c)| if i % 2 == 0 { c.clone() } else { Rational::zero() })
                .collect(),
        );
        let odd = &p - &even;
        if even.central_l().is_odd()
            && even.derivative().is_odd()
            && odd.central_l().is_even()
            && odd.derivative().is_even()
        {
            ok += 1;
        }
    }
    let (fast, time) = within(start, Duration::from_secs(5));
    (ok == 500 && fast, format!("{ok}/500 even/odd pairs change parity under L and D, {time}"))
}

fn triangular_consistency() -> Outcome {
    let mut rng = rng(10);
    let systems = [
        assemble_triangular(Parity::Even, 8).unwrap(),
        assemble_triangular(Parity::Odd, 8).unwrap(),
    ];
    let satisfied = (0..50)
        .filter(|_| {
            let a = assignment_from_poly(&poly_up_to(&mut rng, 2, 1_000_000), 8);
            systems
                .iter()
                .all(|s| s.residual_on_coefficients(&a).unwrap().iter().all(Zero::is_zero))
        })
        .count();
    let mut a = assignment_from_poly(&Poly::zero(), 8);
    a.insert(3, rational::int(1));
    let r0 = systems[0].residual_on_coefficients(&a).unwrap()[0].clone();
    let s3_const = s_n(3).unwrap().coeff(0);
    (
        satisfied == 50 && r0 == s3_const && r0 == rational::ratio(1, 4),
        format!("{satisfied}/50 quadratic truncations satisfy both systems; a_3 = 1 gives row 0 residual {}", rational::to_text(&r0)),
    )
}

fn main() {
    let criteria: [(&str, fn() -> Outcome); 10] = [
        ("table reproduction", table_reproduction),
        ("null space", null_space),
        ("operator identities", operator_identities),
        ("admissibility gate", admissibility_gate),
        ("forced exp extension", forced_exp_extension),
        ("method-of-steps residual", method_of_steps_residual),
        ("closed-form equivalence", closed_form_equivalence),
        ("characteristic roots", characteristic_roots),
        ("parity", parity_suite),
        ("triangular consistency", triangular_consistency),
    ];
    let mut failed = 0;
    for (i, (name, run)) in criteria.iter().enumerate() {
        let (ok, detail) = run();
        if !ok {
            failed += 1;
        }
        println!("{} {:>2} {name}: {detail}", if ok { "PASS" } else { "FAIL" }, i + 1);
    }
    println!("{} of {} criteria passed", criteria.len() - failed, criteria.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
