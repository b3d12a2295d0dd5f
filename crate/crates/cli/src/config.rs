//! Run settings: command-line flags override the `--config` JSON file, which
//! overrides built-in defaults.

use anyhow::{Context, Result};
use dde_core::steps::Order;
use dde_core::triangular::Parity;
use serde::{Deserialize, Serialize};
use std::path::{Path, PathBuf};

/// Bad arguments. Reported like a clap error, exit code 64.
#[derive(Debug)]
pub struct UsageError(pub String);

impl std::fmt::Display for UsageError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for UsageError {}

pub fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

/// `"unbounded"`/`"inf"` or a non-negative integer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum OrderArg {
    Finite(usize),
    Named(Unbounded),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Unbounded {
    Unbounded,
}

impl OrderArg {
    pub fn order(self) -> Order {
        match self {
            OrderArg::Finite(k) => Order::Finite(k),
            OrderArg::Named(_) => Order::Unbounded,
        }
    }
}

impl std::str::FromStr for OrderArg {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        match s {
            "unbounded" | "inf" => Ok(OrderArg::Named(Unbounded::Unbounded)),
            _ => s
                .parse()
                .map(OrderArg::Finite)
                .map_err(|_| format!("expected an integer or \"unbounded\", got {s:?}")),
        }
    }
}

/// Everything a config file may set. Unknown keys are rejected.
#[derive(Debug, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FileConfig {
    pub out: Option<PathBuf>,
    pub json: Option<bool>,
    pub m_max: Option<u32>,
    pub compare_paper: Option<bool>,
    pub h: Option<String>,
    pub k: Option<OrderArg>,
    pub span: Option<usize>,
    pub force: Option<bool>,
    pub samples: Option<usize>,
    #[serde(rename = "box")]
    pub bx: Option<[f64; 4]>,
    pub grid: Option<usize>,
    pub file: Option<PathBuf>,
    pub points: Option<usize>,
    pub n_max: Option<usize>,
    pub parity: Option<Parity>,
    pub n: Option<usize>,
}

impl FileConfig {
    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path)
            .with_context(|| format!("reading config {}", path.display()))?;
        serde_json::from_str(&text)
            .map_err(|e| usage(format!("config {}: {e}", path.display())))
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct SnTableConfig {
    pub m_max: u32,
    pub compare_paper: bool,
}

#[derive(Debug, Clone, Serialize)]
pub struct SolveConfig {
    pub h: String,
    pub k: OrderArg,
    pub span: usize,
    pub force: bool,
    pub samples: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct RootsConfig {
    #[serde(rename = "box")]
    pub bx: [f64; 4],
    pub grid: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct VerifyConfig {
    pub file: PathBuf,
    pub points: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct OpcheckConfig {
    pub n_max: usize,
}

#[derive(Debug, Clone, Serialize)]
pub struct TriangularConfig {
    pub parity: Parity,
    pub n: usize,
}

pub const DEFAULT_OUT: &str = "dde-out";
pub const DEFAULT_SAMPLES: usize = 201;
pub const DEFAULT_POINTS: usize = 101;
pub const DEFAULT_BOX: [f64; 4] = [-0.5, 0.5, -0.5, 0.5];
pub const DEFAULT_GRID: usize = 20;
