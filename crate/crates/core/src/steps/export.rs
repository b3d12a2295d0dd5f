//! JSON form of a piecewise solution and of its knot diagnostics.

use super::{KnotJump, PiecewiseSolution, Provenance, Segment, StepsError};
use crate::expr::parse;
use crate::poly::Poly;
use crate::rational;
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SegmentRecord {
    pub n: i64,
    /// `[n/2, (n+1)/2]` as exact rationals.
    pub domain: [String; 2],
    pub formula: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub poly: Option<Poly>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SolutionFile {
    pub provenance: Provenance,
    pub span: usize,
    pub segments: Vec<SegmentRecord>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KnotRecord {
    pub knot: String,
    pub value_jump: f64,
    pub derivative_jump: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_value_jump: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub exact_derivative_jump: Option<String>,
}

impl From<&KnotJump> for KnotRecord {
    fn from(k: &KnotJump) -> Self {
        Self {
            knot: rational::to_text(&k.knot),
            value_jump: k.value_jump,
            derivative_jump: k.derivative_jump,
            exact_value_jump: k.exact_value_jump.as_ref().map(rational::to_text),
            exact_derivative_jump: k.exact_derivative_jump.as_ref().map(rational::to_text),
        }
    }
}

fn domain_text(n: i64) -> [String; 2] {
    [
        rational::to_text(&rational::ratio(n, 2)),
        rational::to_text(&rational::ratio(n + 1, 2)),
    ]
}

impl SegmentRecord {
    pub fn from_segment(s: &Segment) -> Self {
        Self {
            n: s.index(),
            domain: domain_text(s.index()),
            formula: s.formula().to_string(),
            poly: s.poly().cloned(),
        }
    }

    pub fn to_segment(&self) -> Result<Segment, StepsError> {
        let bad = |what: String| StepsError::Import(format!("segment {}: {what}", self.n));
        if self.domain != domain_text(self.n) {
            return Err(bad(format!(
                "domain {:?} does not match index (expected {:?})",
                self.domain,
                domain_text(self.n)
            )));
        }
        let formula = parse(&self.formula).map_err(|e| bad(format!("formula: {e}")))?;
        Ok(Segment::new(self.n, formula.simplify(), self.poly.clone()))
    }
}

impl PiecewiseSolution {
    /// Serialisable form. Only symmetric solutions (`-(m+1) ..= m`) have a span.
    pub fn to_file(&self) -> Result<SolutionFile, StepsError> {
        let span = self
            .span()
            .ok_or_else(|| StepsError::Import("solution is not symmetric about 0".into()))?;
        Ok(SolutionFile {
            provenance: self.provenance,
            span,
            segments: self.segments.iter().map(SegmentRecord::from_segment).collect(),
        })
    }

    pub fn from_file(file: &SolutionFile) -> Result<Self, StepsError> {
        let segments = file
            .segments
            .iter()
            .map(SegmentRecord::to_segment)
            .collect::<Result<Vec<_>, _>>()?;
        let out = Self::from_segments(segments, file.provenance)?;
        if out.span() != Some(file.span) {
            return Err(StepsError::Import(format!(
                "span {} requires segments {}..={}, found {}..={}",
                file.span,
                -(file.span as i64) - 1,
                file.span,
                out.first_index(),
                out.last_index()
            )));
        }
        Ok(out)
    }

    pub fn to_json(&self) -> Result<String, StepsError> {
        let file = self.to_file()?;
        Ok(serde_json::to_string_pretty(&file).expect("plain data serialises"))
    }

    pub fn from_json(text: &str) -> Result<Self, StepsError> {
        let file: SolutionFile =
            serde_json::from_str(text).map_err(|e| StepsError::Import(e.to_string()))?;
        Self::from_file(&file)
    }
}
