//! Truncated coefficient systems for power-series solutions `y = Σ a_n x^n`.
//!
//! Substituting the series into `(L - D) y = 0` and collecting powers of `x`
//! splits into two homogeneous triangular families: one in the odd-index
//! unknowns `a_3, a_5, ...` (from the even powers `x^{2k}`) and one in the
//! even-index unknowns `a_4, a_6, ...` (from the odd powers `x^{2k-1}`).
//! `a_0, a_1, a_2` never appear.

use crate::poly::{s_n, Poly};
use crate::rational::{self, Rational};
use num_traits::Zero;
use serde::ser::SerializeMap;
use serde::{Deserialize, Serialize, Serializer};
use std::collections::BTreeMap;
use thiserror::Error;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    /// Rows from even powers `x^{2k}`, unknowns `a_{2n-1}`.
    Even,
    /// Rows from odd powers `x^{2k-1}`, unknowns `a_{2n}`.
    Odd,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TriangularError {
    #[error("truncation must be at least 2 (got {0})")]
    Truncation(usize),
    #[error("assignment is missing unknown a_{0}")]
    MissingUnknown(usize),
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Row {
    pub k: usize,
    #[serde(serialize_with = "coeff_map")]
    pub coeffs: BTreeMap<usize, Rational>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TriangularSystem {
    pub parity: Parity,
    #[serde(rename = "N")]
    pub truncation: usize,
    pub rows: Vec<Row>,
}

fn coeff_map<S: Serializer>(m: &BTreeMap<usize, Rational>, s: S) -> Result<S::Ok, S::Error> {
    let mut map = s.serialize_map(Some(m.len()))?;
    for (i, c) in m {
        map.serialize_entry(&i.to_string(), &rational::to_text(c))?;
    }
    map.end()
}

/// `S_m(x) - m x^{m-1}`: the part of `L x^m` that `D x^m` does not cancel.
fn reduced_s(m: u32) -> Poly {
    let s = s_n(m).expect("m >= 1");
    &s - &Poly::monomial(rational::int(m as i64), m as usize - 1)
}

/// Builds rows `k = 0..=N-2` (even family) or `k = 1..=N-1` (odd family) over the
/// unknowns with index up to `2N`. Coefficients come from the binomial
/// expansion of `S_m` directly.
pub fn assemble_triangular(
    parity: Parity,
    truncation: usize,
) -> Result<TriangularSystem, TriangularError> {
    if truncation < 2 {
        return Err(TriangularError::Truncation(truncation));
    }
    let (ks, unknown, power): (Vec<usize>, fn(usize) -> usize, fn(usize) -> usize) = match parity {
        Parity::Even => ((0..=truncation - 2).collect(), |n| 2 * n - 1, |k| 2 * k),
        Parity::Odd => ((1..truncation).collect(), |n| 2 * n, |k| 2 * k - 1),
    };
    let reduced: Vec<(usize, Poly)> = (2..=truncation)
        .map(|n| (unknown(n), reduced_s(unknown(n) as u32)))
        .collect();
    let rows = ks
        .into_iter()
        .map(|k| {
            let coeffs = reduced
                .iter()
                .filter_map(|(idx, poly)| {
                    let c = poly.coeff(power(k));
                    (!c.is_zero()).then_some((*idx, c))
                })
                .collect();
            Row { k, coeffs }
        })
        .collect();
    Ok(TriangularSystem {
        parity,
        truncation,
        rows,
    })
}

impl TriangularSystem {
    /// Every unknown index referenced by some row.
    pub fn unknowns(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = self
            .rows
            .iter()
            .flat_map(|r| r.coeffs.keys().copied())
            .collect();
        idx.sort_unstable();
        idx.dedup();
        idx
    }

    /// Left-hand side of each row under the given assignment `a_i`.
    pub fn residual_on_coefficients(
        &self,
        assignment: &BTreeMap<usize, Rational>,
    ) -> Result<Vec<Rational>, TriangularError> {
        self.rows
            .iter()
            .map(|row| {
                row.coeffs.iter().try_fold(Rational::zero(), |acc, (i, c)| {
                    let a = assignment
                        .get(i)
                        .ok_or(TriangularError::MissingUnknown(*i))?;
                    Ok(acc + c * a)
                })
            })
            .collect()
    }
}

/// Reads `a_3 ..= a_{2N}` off a polynomial's coefficients.
pub fn assignment_from_poly(p: &Poly, truncation: usize) -> BTreeMap<usize, Rational> {
    (3..=2 * truncation).map(|i| (i, p.coeff(i))).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rational::{int, ratio};

    /// Independent oracle: coefficient of `x^j` in `(x+1/2)^m - (x-1/2)^m - m x^{m-1}`
    /// by brute-force expansion of each binomial power.
    fn oracle(m: u32, j: usize) -> Rational {
        let plus = Poly::from_coeffs(vec![ratio(1, 2), int(1)]);
        let minus = Poly::from_coeffs(vec![ratio(-1, 2), int(1)]);
        let pow = |b: &Poly| (0..m).fold(Poly::one(), |acc, _| &acc * b);
        let d = &(&pow(&plus) - &pow(&minus)) - &Poly::monomial(int(m as i64), m as usize - 1);
        d.coeff(j)
    }

    #[test]
    fn even_row_zero_small() {
        let sys = assemble_triangular(Parity::Even, 3).unwrap();
        let row = &sys.rows[0];
        assert_eq!(row.k, 0);
        assert_eq!(row.coeffs.len(), 2);
        assert_eq!(row.coeffs[&3], oracle(3, 0));
        assert_eq!(row.coeffs[&5], oracle(5, 0));
        assert_eq!(row.coeffs[&3], ratio(1, 4));
        assert_eq!(row.coeffs[&5], ratio(1, 16));
    }

    #[test]
    fn odd_row_one_small() {
        let sys = assemble_triangular(Parity::Odd, 3).unwrap();
        let row = sys.rows.iter().find(|r| r.k == 1).unwrap();
        assert_eq!(row.coeffs[&4], oracle(4, 1));
        assert_eq!(row.coeffs[&6], oracle(6, 1));
        assert_eq!(row.coeffs[&4], int(1));
        assert_eq!(row.coeffs[&6], ratio(3, 8));
        assert_eq!(row.coeffs.len(), 2);
    }

    #[test]
    fn rows_match_oracle_and_support() {
        for parity in [Parity::Even, Parity::Odd] {
            let sys = assemble_triangular(parity, 8).unwrap();
            for row in &sys.rows {
                let power = match parity {
                    Parity::Even => 2 * row.k,
                    Parity::Odd => 2 * row.k - 1,
                };
                for n in 2..=8usize {
                    let m = match parity {
                        Parity::Even => 2 * n - 1,
                        Parity::Odd => 2 * n,
                    };
                    let expect = oracle(m as u32, power);
                    let got = row.coeffs.get(&m).cloned().unwrap_or_else(Rational::zero);
                    assert_eq!(got, expect, "{parity:?} k={} a_{m}", row.k);
                }
                assert!(row.coeffs.values().all(|c| !c.is_zero()));
                let family_ok = row.coeffs.keys().all(|i| match parity {
                    Parity::Even => i % 2 == 1,
                    Parity::Odd => i % 2 == 0,
                });
                assert!(family_ok);
            }
            let ks: Vec<usize> = sys.rows.iter().map(|r| r.k).collect();
            match parity {
                Parity::Even => assert_eq!(ks, (0..=6).collect::<Vec<_>>()),
                Parity::Odd => assert_eq!(ks, (1..=7).collect::<Vec<_>>()),
            }
        }
    }

    #[test]
    fn odd_rows_follow_the_proof_expansion() {
        // coefficient of x^{2k-1} in S_{2n} is 2^{2k-2n} C(2n, 2k-1)
        let sys = assemble_triangular(Parity::Odd, 6).unwrap();
        for row in &sys.rows {
            for (&m, c) in &row.coeffs {
                let n = (m / 2) as i64;
                let k = row.k as i64;
                let b = Rational::from_integer(rational::binomial(2 * n as u32, (2 * k - 1) as u32));
                let expect = b * rational::pow(&ratio(1, 4), (n - k) as u32);
                assert_eq!(c, &expect);
            }
        }
    }

    #[test]
    fn residuals() {
        let sys = assemble_triangular(Parity::Even, 3).unwrap();
        let zeros: BTreeMap<usize, Rational> = (3..=6).map(|i| (i, Rational::zero())).collect();
        assert!(sys
            .residual_on_coefficients(&zeros)
            .unwrap()
            .iter()
            .all(Zero::is_zero));

        let quad = Poly::from_ints(&[4, -1, 9]);
        let a = assignment_from_poly(&quad, 3);
        assert!(sys.residual_on_coefficients(&a).unwrap().iter().all(Zero::is_zero));

        let mut single = zeros.clone();
        single.insert(3, int(1));
        let r = sys.residual_on_coefficients(&single).unwrap();
        assert_eq!(r[0], oracle(3, 0));

        let mut missing = zeros;
        missing.remove(&5);
        assert_eq!(
            sys.residual_on_coefficients(&missing),
            Err(TriangularError::MissingUnknown(5))
        );
    }

    #[test]
    fn rejects_small_truncation() {
        assert_eq!(
            assemble_triangular(Parity::Even, 1),
            Err(TriangularError::Truncation(1))
        );
    }

    #[test]
    fn json_layout() {
        let sys = assemble_triangular(Parity::Even, 3).unwrap();
        let v = serde_json::to_value(&sys).unwrap();
        assert_eq!(v["parity"], "even");
        assert_eq!(v["N"], 3);
        assert_eq!(v["rows"][0]["k"], 0);
        assert_eq!(v["rows"][0]["coeffs"]["3"], "1/4");
        assert_eq!(v["rows"][0]["coeffs"]["5"], "1/16");
    }
}
