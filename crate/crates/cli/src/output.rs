use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{json, Value};
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Status {
    Ok,
    /// Solved past a failed admissibility check.
    Forced,
    /// A check ran and did not pass.
    Failed,
}

impl Status {
    pub fn code(self) -> u8 {
        match self {
            Status::Ok => 0,
            Status::Forced => 2,
            Status::Failed => 3,
        }
    }
}

/// What a command produced. The header (command and resolved config) is kept
/// apart from the payload so payload files never carry run metadata.
pub struct Report {
    pub command: &'static str,
    pub config: Value,
    pub lines: Vec<String>,
    pub result: Value,
    pub status: Status,
}

impl Report {
    pub fn new(command: &'static str, config: Value) -> Self {
        Self {
            command,
            config,
            lines: Vec::new(),
            result: Value::Null,
            status: Status::Ok,
        }
    }

    pub fn line(&mut self, s: impl Into<String>) {
        self.lines.push(s.into());
    }

    pub fn header(&self) -> Value {
        json!({ "command": self.command, "config": self.config })
    }

    pub fn render(&self, as_json: bool) -> String {
        if as_json {
            let doc = json!({
                "command": self.command,
                "config": self.config,
                "status": self.status,
                "result": self.result,
            });
            return serde_json::to_string_pretty(&doc).expect("json value") + "\n";
        }
        let mut out = format!("# dde {}\n# config {}\n", self.command, self.config);
        for l in &self.lines {
            out.push_str(l);
            out.push('\n');
        }
        out
    }
}

pub struct OutDir(PathBuf);

impl OutDir {
    pub fn create(path: &Path) -> Result<Self> {
        std::fs::create_dir_all(path)
            .with_context(|| format!("creating output directory {}", path.display()))?;
        Ok(Self(path.to_path_buf()))
    }

    pub fn write(&self, name: &str, contents: &str) -> Result<PathBuf> {
        let p = self.0.join(name);
        std::fs::write(&p, contents).with_context(|| format!("writing {}", p.display()))?;
        Ok(p)
    }

    pub fn write_json<T: Serialize>(&self, name: &str, value: &T) -> Result<PathBuf> {
        let text = serde_json::to_string_pretty(value).expect("serialisable payload") + "\n";
        self.write(name, &text)
    }
}

/// `{:.16e}`: 17 significant digits, enough to round-trip any `f64`.
pub fn float(x: f64) -> String {
    format!("{x:.16e}")
}
