use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use anyhow::{Context, Result};
use serde::Serialize;
use serde_json::{Map, Value};
use sha2::{Digest, Sha256};

pub const EXIT_OK: u8 = 0;
pub const EXIT_USAGE: u8 = 1;
pub const EXIT_OBSTRUCTED: u8 = 2;
pub const EXIT_DIVERGENT: u8 = 3;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    /// Floats use 17 significant digits in scientific notation.
    pub fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) if x.is_finite() => format!("{x:.16e}"),
            Cell::Float(x) => x.to_string(),
            Cell::Text(s) => s.clone(),
        }
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: Vec<String>) -> Self {
        Table {
            name: name.to_string(),
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        Ok(String::from_utf8(w.into_inner()?)?)
    }
}

/// Result of one subcommand before it is written anywhere.
#[derive(Debug, Clone)]
pub struct Outcome {
    pub payload: Value,
    pub tables: Vec<Table>,
    pub exit: u8,
    pub reason: Option<String>,
}

impl Outcome {
    pub fn ok(payload: Value) -> Self {
        Outcome {
            payload,
            tables: Vec::new(),
            exit: EXIT_OK,
            reason: None,
        }
    }

    pub fn with_table(mut self, t: Table) -> Self {
        self.tables.push(t);
        self
    }

    pub fn fail(mut self, exit: u8, reason: impl Into<String>) -> Self {
        self.exit = exit;
        self.reason = Some(reason.into());
        self
    }
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("report types serialize to JSON")
}

pub fn sha256_hex(bytes: &[u8]) -> String {
    let digest = Sha256::digest(bytes);
    let mut s = String::with_capacity(64);
    for b in digest.iter() {
        let _ = write!(s, "{b:02x}");
    }
    s
}

#[derive(Debug, Clone, Serialize)]
pub struct InputDigest {
    pub name: String,
    /// File path, or `None` for values given inline on the command line.
    pub path: Option<String>,
    pub sha256: String,
}

#[derive(Debug, Clone, Serialize)]
pub struct RunManifest {
    pub tool: &'static str,
    pub version: &'static str,
    pub subcommand: String,
    pub config: Map<String, Value>,
    pub inputs: Vec<InputDigest>,
    pub exit_code: u8,
    pub reason: Option<String>,
    pub outputs: Vec<String>,
    pub duration_seconds: f64,
}

/// Writes `result.json`, one CSV per table and `manifest.json` into `dir`,
/// returning the written file names.
pub fn write_artifacts(dir: &Path, outcome: &Outcome) -> Result<Vec<String>> {
    fs::create_dir_all(dir).with_context(|| format!("creating {}", dir.display()))?;
    let mut written = Vec::new();
    let result = serde_json::to_string_pretty(&outcome.payload)? + "\n";
    fs::write(dir.join("result.json"), result)?;
    written.push("result.json".to_string());
    for t in &outcome.tables {
        let name = format!("{}.csv", t.name);
        fs::write(dir.join(&name), t.to_csv()?)?;
        written.push(name);
    }
    Ok(written)
}

pub fn write_manifest(dir: &Path, manifest: &RunManifest) -> Result<()> {
    let text = serde_json::to_string_pretty(manifest)? + "\n";
    fs::write(dir.join("manifest.json"), text)?;
    Ok(())
}
