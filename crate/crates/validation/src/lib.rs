//! Seeded random inputs for the acceptance suite.

use dde_core::poly::Poly;
use dde_core::rational::{self, Rational};
use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

pub fn rng(seed: u64) -> StdRng {
    StdRng::seed_from_u64(seed)
}

/// Uniform numerator over a denominator in 1..=1000, so |value| <= bound.
pub fn rational_in(rng: &mut StdRng, bound: i64) -> Rational {
    let den = rng.gen_range(1..=1000i64);
    rational::ratio(rng.gen_range(-bound * den..=bound * den), den)
}

/// Degree drawn uniformly from 0..=max_deg.
pub fn poly_up_to(rng: &mut StdRng, max_deg: usize, bound: i64) -> Poly {
    let deg = rng.gen_range(0..=max_deg);
    Poly::from_coeffs((0..=deg).map(|_| rational_in(rng, bound)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn seeded_draws_repeat() {
        let a = poly_up_to(&mut rng(1), 12, 1000);
        let b = poly_up_to(&mut rng(1), 12, 1000);
        assert_eq!(a, b);
        assert!(a.degree().unwrap_or(0) <= 12);
    }

    #[test]
    fn bound_holds() {
        let mut r = rng(7);
        let cap = rational::int(5);
        assert!((0..500).all(|_| rational_in(&mut r, 5) <= cap));
        assert!((0..500).all(|_| rational_in(&mut r, 5) >= -cap.clone()));
    }
}
