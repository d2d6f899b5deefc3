//! Machine-readable report assembly.
//!
//! One row per (unit, order); columns vary by command. CSV numbers use the
//! shortest round-trip formatting, so re-parsing a report reproduces every
//! score bit for bit. Infinite scores serialize as the strings `"inf"` and
//! `"-inf"` in JSON.

use netput_eff_core::ExtReal;
use serde_json::{json, Map, Value};

#[derive(Debug, Clone)]
pub enum Cell {
    Str(String),
    Num(f64),
    Ext(ExtReal),
    Bool(bool),
    Empty,
}

impl Cell {
    fn to_csv_field(&self) -> String {
        match self {
            Cell::Str(s) => s.clone(),
            Cell::Num(v) => format!("{v}"),
            Cell::Ext(e) => e.to_string(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Str(s) => json!(s),
            Cell::Num(v) => json!(v),
            Cell::Ext(ExtReal::Finite(v)) => json!(v),
            Cell::Ext(e) => json!(e.to_string()),
            Cell::Bool(b) => json!(b),
            Cell::Empty => Value::Null,
        }
    }
}

pub struct Report {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OutputFormat {
    Csv,
    Json,
}

impl Report {
    pub fn render(&self, format: OutputFormat) -> String {
        match format {
            OutputFormat::Csv => {
                let mut out = self.columns.join(",");
                out.push('\n');
                for row in &self.rows {
                    let line: Vec<String> = row.iter().map(Cell::to_csv_field).collect();
                    out.push_str(&line.join(","));
                    out.push('\n');
                }
                out
            }
            OutputFormat::Json => {
                let rows: Vec<Value> = self
                    .rows
                    .iter()
                    .map(|row| {
                        let mut obj = Map::new();
                        for (name, cell) in self.columns.iter().zip(row) {
                            obj.insert(name.clone(), cell.to_json());
                        }
                        Value::Object(obj)
                    })
                    .collect();
                let mut text = serde_json::to_string_pretty(&Value::Array(rows)).unwrap();
                text.push('\n');
                text
            }
        }
    }
}
