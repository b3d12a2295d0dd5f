use dde_core::charroots::{newton_root, scan_box, Complex64, ScanBox, ScanConfig, ROOT_TOL};
use dde_core::closedform::closed_segment;
use dde_core::poly::{s_n, Poly};
use dde_core::quadrature::{Integrator, QuadratureSpec};
use dde_core::rational::{self, Rational};
use dde_core::steps::{project_admissible, solve_ivp, InitialFunction, Order};
use dde_core::triangular::{assemble_triangular, assignment_from_poly, Parity};
use dde_core::verify::{dde_residual, integral_form_residual_at, integral_form_residual_exact, null_check_poly};
use num_traits::Zero;
use proptest::prelude::*;

fn rat() -> impl Strategy<Value = Rational> {
    (-1_000_000i64..=1_000_000, 1i64..=1000).prop_map(|(n, d)| rational::ratio(n, d))
}

fn poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(rat(), 0..=max_deg + 1).prop_map(Poly::from_coeffs)
}

fn small_poly(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec((-9i64..=9, 1i64..=4), 0..=max_deg + 1).prop_map(|c| {
        Poly::from_coeffs(c.into_iter().map(|(n, d)| rational::ratio(n, d)).collect())
    })
}

fn initial(p: &Poly) -> InitialFunction {
    InitialFunction::new(dde_core::Expr::from_poly(p), Order::Unbounded).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn shifted_central_difference_is_one_sided(p in poly(12)) {
        let h = rational::half();
        let l = p.central_l();
        prop_assert_eq!(l.shift(&-h.clone()), p.backward_diff());
        prop_assert_eq!(l.shift(&h), p.forward_diff());
        prop_assert_eq!(l.central_l(), p.forward_diff().backward_diff());
        prop_assert_eq!(l.central_l(), &p.forward_diff() - &p.backward_diff());
    }

    #[test]
    fn l_and_d_flip_parity(p in poly(12)) {
        let even = &p + &p.reflect();
        let odd = &p - &p.reflect();
        prop_assert!(even.central_l().is_odd() && even.derivative().is_odd());
        prop_assert!(odd.central_l().is_even() && odd.derivative().is_even());
    }

    #[test]
    fn quadratics_are_solutions(p in poly(2)) {
        prop_assert!(null_check_poly(&p).is_zero());
    }

    #[test]
    fn closed_form_matches_stepwise(p in small_poly(6)) {
        let h = initial(&p);
        let step = solve_ivp(&h, 4, true).unwrap().solution;
        for n in (-4i64..=4).filter(|n| *n != 0 && *n != -1) {
            let c = closed_segment(n, &h).unwrap();
            prop_assert_eq!(c.poly(), step.segment(n).unwrap().poly());
        }
    }

    #[test]
    fn admissible_data_extends_continuously(p in small_poly(6), order in 1usize..=4) {
        let q = project_admissible(&p, order);
        let h = InitialFunction::new(dde_core::Expr::from_poly(&q), Order::Finite(order)).unwrap();
        let sol = solve_ivp(&h, order, false).unwrap().solution;
        for k in sol.knot_diagnostics().unwrap() {
            prop_assert_eq!(k.exact_value_jump, Some(Rational::zero()));
        }
        let (lo, hi) = sol.interval();
        let x = (&lo + &hi) / rational::int(2) + rational::ratio(1, 7);
        if &x - rational::half() >= lo && &x + rational::half() <= hi {
            prop_assert_eq!(integral_form_residual_exact(&sol, &x), Some(Rational::zero()));
        }
    }

    #[test]
    fn piecewise_residual_vanishes_for_any_data(p in small_poly(5), x in -0.99f64..0.99) {
        // Each segment satisfies the equation; only continuity can fail.
        let sol = solve_ivp(&initial(&p), 2, true).unwrap().solution;
        prop_assert_eq!(dde_residual(&sol, x).unwrap(), 0.0);
    }

    #[test]
    fn integral_form_is_translation_consistent(p in small_poly(6), x in -0.9f64..0.9, base in -0.9f64..0.9) {
        let q = project_admissible(&p, 3);
        let h = InitialFunction::new(dde_core::Expr::from_poly(&q), Order::Finite(3)).unwrap();
        let sol = solve_ivp(&h, 3, false).unwrap().solution;
        let integ = Integrator::new(QuadratureSpec::default()).unwrap();
        let a = integral_form_residual_at(&sol, x, 0.0, &integ).unwrap();
        let b = integral_form_residual_at(&sol, x, base, &integ).unwrap();
        prop_assert!((a - b).abs() <= 1e-10);
    }

    #[test]
    fn quadratic_coefficients_satisfy_triangular_rows(p in poly(2)) {
        for parity in [Parity::Even, Parity::Odd] {
            let sys = assemble_triangular(parity, 8).unwrap();
            let a = assignment_from_poly(&p, 8);
            prop_assert!(sys.residual_on_coefficients(&a).unwrap().iter().all(Zero::is_zero));
        }
    }

    #[test]
    fn newton_respects_odd_symmetry(re in 6.5f64..8.5, im in 1.5f64..3.5) {
        if let Ok(r) = newton_root(Complex64::new(re, im), ROOT_TOL, 100) {
            let m = newton_root(-r.w, ROOT_TOL, 5).unwrap();
            prop_assert!((m.w + r.w).norm() < 1e-12);
            let c = newton_root(r.w.conj(), ROOT_TOL, 5).unwrap();
            prop_assert!((c.w - r.w.conj()).norm() < 1e-12);
        }
    }
}

#[test]
fn monomial_defects_are_reduced_s() {
    for n in 3..=10u32 {
        let xn = Poly::monomial(rational::int(1), n as usize);
        let want = &s_n(n).unwrap() - &Poly::monomial(rational::int(n as i64), n as usize - 1);
        assert!(!want.is_zero());
        assert_eq!(null_check_poly(&xn), want);
    }
}

#[test]
fn symmetric_box_has_symmetric_roots() {
    let roots = scan_box(
        ScanBox::new((-8.0, 8.0), (-3.0, 3.0)),
        ScanConfig {
            grid_n: 41,
            ..ScanConfig::default()
        },
    );
    assert!(roots.iter().any(|r| r.is_trivial()));
    for r in &roots {
        for image in [-r.w, r.w.conj()] {
            assert!(
                roots.iter().any(|s| (s.w - image).norm() < 1e-6),
                "missing image {image} of {}",
                r.w
            );
        }
    }
}
