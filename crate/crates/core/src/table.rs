//! Regeneration of the published `S_m` table (m = 1..10) and a term-by-term
//! comparison against its printed values.

use crate::poly::{s_n, Poly};
use crate::rational::{self, Rational};
use num_traits::Zero;
use serde::Serialize;

/// Printed table, transcribed as it appears (including its misprints).
/// Each entry lists `(power, coefficient)` pairs.
pub const PRINTED_TABLE: [(u32, &[(usize, &str)]); 10] = [
    (1, &[(0, "1")]),
    (2, &[(1, "2")]),
    (3, &[(0, "1/4"), (2, "3")]),
    (4, &[(1, "1"), (3, "4")]),
    (5, &[(0, "1/16"), (2, "5/2"), (4, "5")]),
    (6, &[(1, "3/8"), (3, "5"), (5, "6")]),
    (7, &[(0, "1/64"), (2, "21/16"), (4, "35/4"), (6, "7")]),
    (8, &[(1, "1/8"), (3, "7/2"), (5, "14"), (7, "8")]),
    (9, &[(0, "1/128"), (2, "9/16"), (4, "63/8"), (6, "21/2"), (8, "9")]),
    (10, &[(1, "10/256"), (3, "15/8"), (5, "63/2"), (7, "30"), (9, "10")]),
];

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Discrepancy {
    pub m: u32,
    pub power: usize,
    pub printed: String,
    pub computed: String,
}

pub fn printed_poly(m: u32) -> Option<Poly> {
    let (_, terms) = PRINTED_TABLE.iter().find(|(row, _)| *row == m)?;
    let deg = terms.iter().map(|(p, _)| *p).max().unwrap_or(0);
    let mut coeffs = vec![Rational::zero(); deg + 1];
    for (p, c) in terms.iter() {
        coeffs[*p] = rational::from_text(c).expect("transcription is well-formed");
    }
    Some(Poly::from_coeffs(coeffs))
}

/// `S_1 ..= S_{m_max}` from direct expansion.
pub fn generate(m_max: u32) -> Vec<(u32, Poly)> {
    (1..=m_max)
        .map(|m| (m, s_n(m).expect("m >= 1")))
        .collect()
}

/// Every coefficient where the printed table and direct expansion disagree,
/// for the rows `m <= m_max` that exist in the printed table.
pub fn compare_with_printed(m_max: u32) -> Vec<Discrepancy> {
    let mut out = Vec::new();
    for (m, computed) in generate(m_max.min(10)) {
        let printed = printed_poly(m).expect("rows 1..=10 are transcribed");
        let top = computed.coeffs().len().max(printed.coeffs().len());
        for power in 0..top {
            let (a, b) = (printed.coeff(power), computed.coeff(power));
            if a != b {
                out.push(Discrepancy {
                    m,
                    power,
                    printed: rational::to_text(&a),
                    computed: rational::to_text(&b),
                });
            }
        }
    }
    out
}
