//! Run directories: JSON-lines results, CSV tables, checks and manifest.
//!
//! Result files contain no timing or host data so that a replay writes
//! the same bytes. Wall time goes to the manifest only.

use std::fs;
use std::path::{Path, PathBuf};

use anyhow::Context;
use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

pub const RESULTS: &str = "results.jsonl";
pub const CHECKS: &str = "checks.json";
pub const MANIFEST: &str = "manifest.json";
pub const REPORT: &str = "report.json";

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Record {
    pub op: String,
    pub model: String,
    pub params: Map<String, Value>,
    pub estimate: Option<f64>,
    pub stderr: Option<f64>,
    pub replicas: u64,
    pub seed: u64,
    pub wall_time: Option<f64>,
}

/// A named theorem check. `margin` is the signed distance from the pass
/// boundary, positive on the passing side.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    pub margin: Option<f64>,
    pub detail: String,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Manifest {
    pub command: String,
    /// Arguments that reproduce the run with every parameter pinned.
    pub args: Vec<String>,
    pub params: Map<String, Value>,
    pub seed: u64,
    pub version: String,
    pub threads: usize,
    pub wall_time: f64,
    pub outputs: Vec<String>,
}

impl Manifest {
    pub fn load(dir: &Path) -> anyhow::Result<Self> {
        let path = dir.join(MANIFEST);
        let text = fs::read_to_string(&path).with_context(|| format!("no manifest at {}", path.display()))?;
        serde_json::from_str(&text).with_context(|| format!("corrupt manifest {}", path.display()))
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

pub struct RunDir {
    path: PathBuf,
    seed: u64,
    records: Vec<Record>,
    checks: Vec<Check>,
    outputs: Vec<String>,
}

impl RunDir {
    pub fn create(path: &Path, seed: u64) -> anyhow::Result<Self> {
        fs::create_dir_all(path).with_context(|| format!("creating run directory {}", path.display()))?;
        Ok(RunDir { path: path.to_path_buf(), seed, records: Vec::new(), checks: Vec::new(), outputs: Vec::new() })
    }

    pub fn path(&self) -> &Path {
        &self.path
    }

    pub fn record(&mut self, op: &str, model: &str, params: Value, estimate: f64, stderr: f64, replicas: u64) {
        let params = match params {
            Value::Object(m) => m,
            Value::Null => Map::new(),
            other => Map::from_iter([("value".to_string(), other)]),
        };
        self.records.push(Record {
            op: op.to_string(),
            model: model.to_string(),
            params,
            estimate: finite(estimate),
            stderr: finite(stderr),
            replicas,
            seed: self.seed,
            wall_time: None,
        });
    }

    pub fn check(&mut self, name: impl Into<String>, pass: bool, margin: f64, detail: impl Into<String>) {
        self.checks.push(Check { name: name.into(), pass, margin: finite(margin), detail: detail.into() });
    }

    pub fn checks(&self) -> &[Check] {
        &self.checks
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    fn track(&mut self, name: &str) {
        if !self.outputs.iter().any(|o| o == name) {
            self.outputs.push(name.to_string());
        }
    }

    pub fn write_csv(&mut self, name: &str, header: &[&str], rows: &[Vec<String>]) -> anyhow::Result<()> {
        let mut w = csv::Writer::from_path(self.path.join(name))?;
        w.write_record(header)?;
        for r in rows {
            w.write_record(r)?;
        }
        w.flush()?;
        self.track(name);
        Ok(())
    }

    pub fn write_json<T: Serialize>(&mut self, name: &str, value: &T) -> anyhow::Result<()> {
        let mut text = serde_json::to_string_pretty(value)?;
        text.push('\n');
        fs::write(self.path.join(name), text)?;
        self.track(name);
        Ok(())
    }

    /// Writes results, checks and the manifest. Returns the manifest.
    pub fn finish(
        mut self,
        command: &str,
        args: Vec<String>,
        params: Map<String, Value>,
        threads: usize,
        wall_time: f64,
    ) -> anyhow::Result<Manifest> {
        let mut lines = String::new();
        for r in &self.records {
            lines.push_str(&serde_json::to_string(r)?);
            lines.push('\n');
        }
        fs::write(self.path.join(RESULTS), lines)?;
        self.track(RESULTS);
        let checks = std::mem::take(&mut self.checks);
        self.write_json(CHECKS, &checks)?;
        let manifest = Manifest {
            command: command.to_string(),
            args,
            params,
            seed: self.seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
            threads,
            wall_time,
            outputs: self.outputs.clone(),
        };
        self.write_json(MANIFEST, &manifest)?;
        Ok(manifest)
    }
}

/// Formats a float for tables: shortest round-trip representation.
pub fn num(x: f64) -> String {
    if x.is_finite() {
        x.to_string()
    } else {
        String::new()
    }
}
