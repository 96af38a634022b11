//! CSV and JSON rendering of result tables.
//!
//! CSV: `#`-prefixed metadata lines (version, seed, config), a header row,
//! then one row per checkpoint or sample. Non-finite numbers are written as
//! the sentinels `inf`, `-inf` and `escaped`.
//!
//! JSON: `{config, seed, version, rows, summary?}` with one object per row.

use serde::Serialize;
use serde_json::{json, Map, Value};
use syncrds::ExtReal;

use crate::config::ExperimentConfig;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Real(f64),
    State(ExtReal),
    Text(String),
    Empty,
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v as i64)
    }
}

impl From<i64> for Cell {
    fn from(v: i64) -> Self {
        Cell::Int(v)
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Real(v)
    }
}

impl From<ExtReal> for Cell {
    fn from(v: ExtReal) -> Self {
        Cell::State(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Int(i64::from(v))
    }
}

fn real_text(v: f64) -> String {
    if v.is_finite() {
        format!("{v}")
    } else if v.is_nan() {
        "nan".into()
    } else if v > 0.0 {
        "inf".into()
    } else {
        "-inf".into()
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            Cell::Real(v) => real_text(*v),
            Cell::State(ExtReal::Finite(v)) => real_text(*v),
            Cell::State(ExtReal::Escaped(_)) => "escaped".into(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Real(v) if v.is_finite() => json!(v),
            Cell::Real(v) => json!(real_text(*v)),
            Cell::State(ExtReal::Finite(v)) => Cell::Real(*v).json(),
            Cell::State(ExtReal::Escaped(_)) => json!("escaped"),
            Cell::Text(s) => json!(s),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

pub struct Report {
    pub config: ExperimentConfig,
    pub table: Table,
    pub summary: Option<Value>,
}

pub fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).expect("serializable report")
}

impl Report {
    pub fn to_json(&self) -> String {
        let rows: Vec<Value> = self
            .table
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self
                    .table
                    .columns
                    .iter()
                    .zip(r)
                    .map(|(c, cell)| (c.to_string(), cell.json()))
                    .collect();
                Value::Object(obj)
            })
            .collect();
        let mut doc = Map::new();
        doc.insert("config".into(), to_value(&self.config));
        doc.insert("seed".into(), json!(self.config.seed()));
        doc.insert("version".into(), json!(syncrds::VERSION));
        doc.insert("rows".into(), Value::Array(rows));
        if let Some(s) = &self.summary {
            doc.insert("summary".into(), s.clone());
        }
        let mut text = serde_json::to_string_pretty(&Value::Object(doc)).expect("json encoding");
        text.push('\n');
        text
    }

    pub fn to_csv(&self) -> String {
        let mut out = String::new();
        out.push_str(&format!("# syncrds {}\n", syncrds::VERSION));
        match self.config.seed() {
            Some(seed) => out.push_str(&format!("# seed={seed}\n")),
            None => out.push_str("# seed=none\n"),
        }
        out.push_str(&format!(
            "# config={}\n",
            serde_json::to_string(&to_value(&self.config)).expect("json encoding")
        ));
        out.push_str(&self.table.columns.join(","));
        out.push('\n');
        for row in &self.table.rows {
            let cells: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Extracts the echoed configuration from a previous report.
pub fn config_from_report(text: &str) -> Result<ExperimentConfig, String> {
    let trimmed = text.trim_start();
    let value: Value = if trimmed.starts_with('#') {
        let line = trimmed
            .lines()
            .find_map(|l| l.strip_prefix("# config="))
            .ok_or("CSV report has no `# config=` line")?;
        serde_json::from_str(line).map_err(|e| e.to_string())?
    } else {
        let v: Value = serde_json::from_str(trimmed).map_err(|e| e.to_string())?;
        match v.get("config") {
            Some(c) => c.clone(),
            None => v,
        }
    };
    serde_json::from_value(value).map_err(|e| e.to_string())
}
