//! Orthogonal projection (in coefficient space) onto the polynomials that
//! satisfy the first `k` compatibility conditions.
//!
//! The conditions only involve `D - L`, which kills quadratics and lowers
//! degree by two, so for `k >= deg - 2` the image is always a quadratic.

use super::poly_defects;
use crate::poly::Poly;
use crate::rational::Rational;
use num_traits::Zero;

pub fn project_admissible(p: &Poly, k: usize) -> Poly {
    let dim = p.coeffs().len();
    if dim == 0 {
        return Poly::zero();
    }
    // Row i is the functional `defect_{i+1}` on the monomial basis.
    let basis: Vec<Vec<Rational>> = (0..dim)
        .map(|j| poly_defects(&Poly::monomial(Rational::from_integer(1.into()), j), k))
        .collect();
    let rows: Vec<Vec<Rational>> = (0..k)
        .map(|i| (0..dim).map(|j| basis[j][i].clone()).collect())
        .collect();
    let b = independent_rows(rows);
    if b.is_empty() {
        return p.clone();
    }
    let c = p.coeffs();
    let gram: Vec<Vec<Rational>> = b
        .iter()
        .map(|u| b.iter().map(|v| dot(u, v)).collect())
        .collect();
    let rhs: Vec<Rational> = b.iter().map(|u| dot(u, c)).collect();
    let y = solve(gram, rhs);
    let mut out = c.to_vec();
    for (row, yi) in b.iter().zip(&y) {
        for (o, r) in out.iter_mut().zip(row) {
            *o -= r * yi;
        }
    }
    Poly::from_coeffs(out)
}

fn dot(u: &[Rational], v: &[Rational]) -> Rational {
    u.iter().zip(v).map(|(a, b)| a * b).sum()
}

/// Row echelon form, keeping the nonzero rows.
fn independent_rows(mut m: Vec<Vec<Rational>>) -> Vec<Vec<Rational>> {
    let cols = m.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(piv) = (rank..m.len()).find(|&r| !m[r][col].is_zero()) else {
            continue;
        };
        m.swap(rank, piv);
        for r in rank + 1..m.len() {
            if m[r][col].is_zero() {
                continue;
            }
            let f = &m[r][col] / &m[rank][col];
            for j in col..cols {
                let t = &f * &m[rank][j];
                m[r][j] -= t;
            }
        }
        rank += 1;
    }
    m.truncate(rank);
    m
}

/// Gaussian elimination on a nonsingular system.
fn solve(mut a: Vec<Vec<Rational>>, mut b: Vec<Rational>) -> Vec<Rational> {
    let n = b.len();
    for col in 0..n {
        let piv = (col..n).find(|&r| !a[r][col].is_zero()).expect("nonsingular Gram matrix");
        a.swap(col, piv);
        b.swap(col, piv);
        for r in 0..n {
            if r == col || a[r][col].is_zero() {
                continue;
            }
            let f = &a[r][col] / &a[col][col];
            for j in col..n {
                let t = &f * &a[col][j];
                a[r][j] -= t;
            }
            let t = &f * &b[col];
            b[r] -= t;
        }
    }
    (0..n).map(|i| &b[i] / &a[i][i]).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn projection_is_idempotent_and_admissible() {
        let p = Poly::from_ints(&[3, -1, 4, 1, -5, 9, 2]);
        let q = project_admissible(&p, 6);
        assert!(poly_defects(&q, 6).iter().all(Zero::is_zero));
        assert_eq!(project_admissible(&q, 6), q);
        assert!(q.degree() <= Some(2));
        // Low order keeps higher degrees.
        let r = project_admissible(&Poly::from_ints(&[0, 0, 0, 0, 0, 1]), 2);
        assert!(poly_defects(&r, 2).iter().all(Zero::is_zero));
        assert_eq!(r.degree(), Some(5));
    }
}
