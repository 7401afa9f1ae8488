//! Checks, tables and the summary document produced by a run.

use serde::Serialize;
use serde_json::{json, Map, Value};

use crate::config::Command;

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: String,
}

impl Check {
    pub fn new(name: impl Into<String>, passed: bool, detail: impl Into<String>) -> Self {
        Check {
            name: name.into(),
            passed,
            detail: detail.into(),
        }
    }
}

/// One CSV file: header row plus records.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub file: &'static str,
    pub header: Vec<&'static str>,
    pub rows: Vec<Vec<String>>,
}

impl Table {
    pub fn new(file: &'static str, header: Vec<&'static str>) -> Self {
        Table {
            file,
            header,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<String>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<Vec<u8>, csv::Error> {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header)?;
        for r in &self.rows {
            w.write_record(r)?;
        }
        w.into_inner().map_err(|e| e.into_error().into())
    }
}

/// Shortest round-trip formatting, identical across runs.
pub fn num(x: f64) -> String {
    format!("{x:e}")
}

pub fn opt_num(x: Option<f64>) -> String {
    x.map(num).unwrap_or_default()
}

#[derive(Debug, Clone)]
pub struct RunReport {
    pub command: Command,
    pub checks: Vec<Check>,
    pub metrics: Map<String, Value>,
    pub tables: Vec<Table>,
}

impl RunReport {
    pub fn new(command: Command) -> Self {
        RunReport {
            command,
            checks: Vec::new(),
            metrics: Map::new(),
            tables: Vec::new(),
        }
    }

    pub fn check(&mut self, name: impl Into<String>, passed: bool, detail: impl Into<String>) {
        self.checks.push(Check::new(name, passed, detail));
    }

    pub fn metric(&mut self, key: &str, value: impl Serialize) {
        self.metrics
            .insert(key.to_string(), serde_json::to_value(value).unwrap_or(Value::Null));
    }

    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(|c| c.passed)
    }

    pub fn first_failure(&self) -> Option<usize> {
        self.checks.iter().position(|c| !c.passed)
    }

    pub fn summary(&self, seed: u64) -> Value {
        json!({
            "command": self.command.name(),
            "all_checks_passed": self.all_passed(),
            "checks": self.checks,
            "metrics": self.metrics,
            "outputs": self.tables.iter().map(|t| t.file).collect::<Vec<_>>(),
            "versions": {"spec": "1", "chernoff_lab": env!("CARGO_PKG_VERSION")},
            "rng": "ChaCha8Rng",
            "seed": seed,
        })
    }
}
