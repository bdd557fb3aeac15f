//! Report types and writers: one JSON summary plus data tables.
//!
//! Tables are written as CSV (header row, shortest round-trip decimal
//! representation of each number) or as JSON arrays of row objects.

use super::config::Format;
use serde::{Deserialize, Serialize};
use std::fs;
use std::path::Path;

pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub pass: bool,
    /// `null` when the check could not be evaluated.
    pub value: Option<f64>,
    pub tolerance: Option<f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub detail: String,
}

impl Check {
    /// Passes when `value ≤ tolerance`.
    pub fn at_most(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), pass: value <= tolerance, value: Some(value), tolerance: Some(tolerance), detail: String::new() }
    }

    /// Passes when `value ≥ tolerance`.
    pub fn at_least(name: &str, value: f64, tolerance: f64) -> Self {
        Check { name: name.into(), pass: value >= tolerance, value: Some(value), tolerance: Some(tolerance), detail: String::new() }
    }

    pub fn flag(name: &str, pass: bool) -> Self {
        Check { name: name.into(), pass, value: None, tolerance: None, detail: String::new() }
    }

    /// A check whose computation itself failed.
    pub fn error(name: &str, err: impl std::fmt::Display) -> Self {
        Check { name: name.into(), pass: false, value: None, tolerance: None, detail: format!("error: {err}") }
    }

    pub fn with_detail(mut self, detail: impl Into<String>) -> Self {
        self.detail = detail.into();
        self
    }

    /// Both must pass; the value and tolerance of `self` are kept.
    pub fn and(mut self, other: &Check) -> Self {
        self.pass &= other.pass;
        let extra = format!("{}={}", other.name, other.value.map_or("null".into(), |v| format!("{v:?}")));
        self.detail = if self.detail.is_empty() { extra } else { format!("{}; {extra}", self.detail) };
        self
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Num(v as f64)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.into())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(v) => format!("{v:?}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn parse(s: &str) -> Self {
        s.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::Text(s.into()))
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(v) => Some(*v),
            Cell::Text(_) => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: String,
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, header: &[&str]) -> Self {
        Table { name: name.into(), header: header.iter().map(|s| s.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.header.len(), "row width for table {}", self.name);
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.header.iter().position(|h| h == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.header).expect("in-memory write");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render)).expect("in-memory write");
        }
        String::from_utf8(w.into_inner().expect("in-memory flush")).expect("utf-8")
    }

    pub fn to_json(&self) -> serde_json::Value {
        let rows = self
            .rows
            .iter()
            .map(|row| {
                let obj = self.header.iter().zip(row).map(|(h, c)| (h.clone(), serde_json::to_value(c).expect("cell serializes"))).collect::<serde_json::Map<_, _>>();
                serde_json::Value::Object(obj)
            })
            .collect();
        serde_json::Value::Array(rows)
    }

    pub fn from_csv(name: &str, text: &str) -> Result<Self, csv::Error> {
        let mut r = csv::Reader::from_reader(text.as_bytes());
        let header = r.headers()?.iter().map(String::from).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(rec?.iter().map(Cell::parse).collect());
        }
        Ok(Table { name: name.into(), header, rows })
    }

    pub fn read_csv(path: &Path) -> Result<Self, std::io::Error> {
        let text = fs::read_to_string(path)?;
        let name = path.file_stem().and_then(|s| s.to_str()).unwrap_or("table");
        Table::from_csv(name, &text).map_err(|e| std::io::Error::new(std::io::ErrorKind::InvalidData, e))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Timing {
    pub scenario: String,
    pub budget_s: f64,
    /// Wall-clock seconds; only recorded on request since it breaks
    /// byte-identical reports.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub seconds: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub schema_version: u32,
    pub scenario: String,
    pub seed: u64,
    pub checks: Vec<Check>,
    pub timings: Vec<Timing>,
}

impl Summary {
    pub fn new(scenario: &str, seed: u64) -> Self {
        Summary { schema_version: SCHEMA_VERSION, scenario: scenario.into(), seed, checks: Vec::new(), timings: Vec::new() }
    }

    pub fn all_pass(&self) -> bool {
        self.checks.iter().all(|c| c.pass)
    }

    pub fn failures(&self) -> impl Iterator<Item = &Check> {
        self.checks.iter().filter(|c| !c.pass)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("summary serializes") + "\n"
    }
}

/// Write the tables and `summary.json` into `dir`, creating it if needed.
pub fn emit_report(dir: &Path, format: Format, summary: &Summary, tables: &[Table]) -> std::io::Result<()> {
    fs::create_dir_all(dir)?;
    for t in tables {
        match format {
            Format::Csv => fs::write(dir.join(format!("{}.csv", t.name)), t.to_csv())?,
            Format::Json => fs::write(dir.join(format!("{}.json", t.name)), serde_json::to_string_pretty(&t.to_json()).expect("table serializes") + "\n")?,
        }
    }
    fs::write(dir.join("summary.json"), summary.to_json())
}
