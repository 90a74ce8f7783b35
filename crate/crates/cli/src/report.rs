use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use anyhow::Result;
use bslab::certificate::EnclosureCertificate;
use bslab::spectral::SearchRect;
use serde::{Deserialize, Serialize};

use crate::cli::Format;
use crate::UsageError;

pub const SCHEMA_VERSION: u32 = 1;

/// Everything needed to rerun a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunConfig {
    pub command: String,
    pub potential: Option<String>,
    pub params: BTreeMap<String, f64>,
    pub grid_n: Option<usize>,
    pub domain: Option<[f64; 2]>,
    pub search: Vec<SearchRect>,
    pub zgrid: Option<String>,
    pub table: Option<String>,
    pub seed: u64,
    pub format: Format,
    pub trials: Option<u64>,
    pub dim_max: Option<usize>,
    pub z_per_system: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tool {
    pub name: String,
    pub version: String,
}

/// One pass/fail line of a run.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub value: f64,
    pub threshold: f64,
}

impl Check {
    /// `value <= threshold`.
    pub fn at_most(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value <= threshold, value, threshold }
    }

    /// `value >= threshold`.
    pub fn at_least(name: &str, value: f64, threshold: f64) -> Self {
        Self { name: name.into(), passed: value >= threshold, value, threshold }
    }

    pub fn flag(name: &str, passed: bool) -> Self {
        Self { name: name.into(), passed, value: passed as u8 as f64, threshold: 1.0 }
    }
}

/// A CSV side file.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Self { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: vec![] }
    }

    pub fn push<T: ToString>(&mut self, row: impl IntoIterator<Item = T>) {
        self.rows.push(row.into_iter().map(|x| x.to_string()).collect());
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub schema_version: u32,
    pub tool: Tool,
    pub config: RunConfig,
    /// Seconds since the Unix epoch; zero under `--fixed-clock`.
    pub started_at: u64,
    pub elapsed_seconds: f64,
    pub passed: bool,
    pub checks: Vec<Check>,
    pub certificates: Vec<EnclosureCertificate>,
    pub result: serde_json::Value,
    #[serde(skip)]
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(config: RunConfig) -> Self {
        Self {
            schema_version: SCHEMA_VERSION,
            tool: Tool { name: env!("CARGO_PKG_NAME").into(), version: env!("CARGO_PKG_VERSION").into() },
            config,
            started_at: 0,
            elapsed_seconds: 0.0,
            passed: true,
            checks: vec![],
            certificates: vec![],
            result: serde_json::Value::Null,
            tables: vec![],
        }
    }

    pub fn check(&mut self, c: Check) {
        self.passed &= c.passed;
        self.checks.push(c);
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)? + "\n")
    }
}

fn write(path: &Path, bytes: &[u8]) -> Result<()> {
    fs::write(path, bytes).map_err(|e| UsageError(format!("cannot write {}: {e}", path.display())).into())
}

/// Writes the report; `csv-bundle` also writes one CSV per table next to
/// `report.json`.
pub fn emit_report(report: &Report, format: Format, out: Option<&Path>) -> Result<()> {
    let json = report.to_json()?;
    match (format, out) {
        (Format::Json, None) => {
            std::io::stdout().write_all(json.as_bytes())?;
        }
        (Format::Json, Some(p)) => write(p, json.as_bytes())?,
        (Format::CsvBundle, None) => return Err(UsageError("csv-bundle needs --out <dir>".into()).into()),
        (Format::CsvBundle, Some(dir)) => {
            fs::create_dir_all(dir).map_err(|e| UsageError(format!("cannot create {}: {e}", dir.display())))?;
            write(&dir.join("report.json"), json.as_bytes())?;
            for t in &report.tables {
                let mut w = csv::Writer::from_writer(vec![]);
                w.write_record(&t.header)?;
                for r in &t.rows {
                    w.write_record(r)?;
                }
                write(&dir.join(format!("{}.csv", t.name)), &w.into_inner()?)?;
            }
        }
    }
    Ok(())
}
