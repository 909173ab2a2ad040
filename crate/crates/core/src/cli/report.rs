//! Tabular output shared by every command: CSV (header row mandatory) and
//! JSON (`{"config": …, "rows": […], "summary": …}`).
//!
//! Exact values are written as `p/q` strings in CSV and as
//! `{"num": "...", "den": "..."}` in JSON; floats use 17 significant digits in
//! CSV and shortest round-trip form in JSON. Both formats parse back to
//! identical cells.

use std::str::FromStr;

use num_bigint::BigInt;
use serde_json::{json, Map, Value};

use crate::exactpoly::Rational;
use crate::gegenbauer::parse_rational;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ColumnKind {
    Text,
    Int,
    Exact,
    Float,
    Bool,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Column {
    pub name: &'static str,
    pub kind: ColumnKind,
}

impl Column {
    pub const fn new(name: &'static str, kind: ColumnKind) -> Self {
        Column { name, kind }
    }
}

#[derive(Clone, Debug)]
pub enum Cell {
    Empty,
    Text(String),
    Int(i64),
    Exact(Rational),
    Float(f64),
    Bool(bool),
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Cell::Empty, Cell::Empty) => true,
            (Cell::Text(a), Cell::Text(b)) => a == b,
            (Cell::Int(a), Cell::Int(b)) => a == b,
            (Cell::Exact(a), Cell::Exact(b)) => a == b,
            (Cell::Float(a), Cell::Float(b)) => a.to_bits() == b.to_bits(),
            (Cell::Bool(a), Cell::Bool(b)) => a == b,
            _ => false,
        }
    }
}

impl From<Option<Cell>> for Cell {
    fn from(value: Option<Cell>) -> Self {
        value.unwrap_or(Cell::Empty)
    }
}

#[derive(Debug, thiserror::Error)]
pub enum ParseError {
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),
    #[error("unexpected header {found:?}, expected {expected:?}")]
    Header {
        found: Vec<String>,
        expected: Vec<String>,
    },
    #[error("row {row}, column {column}: cannot parse {text:?}")]
    Cell {
        row: usize,
        column: &'static str,
        text: String,
    },
}

pub fn format_float(value: f64) -> String {
    format!("{value:.16e}")
}

fn cell_to_csv(cell: &Cell) -> String {
    match cell {
        Cell::Empty => String::new(),
        Cell::Text(s) => s.clone(),
        Cell::Int(i) => i.to_string(),
        Cell::Exact(r) => r.to_string(),
        Cell::Float(f) => format_float(*f),
        Cell::Bool(b) => b.to_string(),
    }
}

fn cell_from_csv(text: &str, kind: ColumnKind) -> Option<Cell> {
    if text.is_empty() {
        return Some(Cell::Empty);
    }
    Some(match kind {
        ColumnKind::Text => Cell::Text(text.to_string()),
        ColumnKind::Int => Cell::Int(text.parse().ok()?),
        ColumnKind::Exact => Cell::Exact(parse_rational(text).ok()?),
        ColumnKind::Float => Cell::Float(text.parse().ok()?),
        ColumnKind::Bool => Cell::Bool(text.parse().ok()?),
    })
}

pub fn exact_to_json(value: &Rational) -> Value {
    json!({"num": value.numer().to_string(), "den": value.denom().to_string()})
}

fn exact_from_json(value: &Value) -> Option<Rational> {
    let num = BigInt::from_str(value.get("num")?.as_str()?).ok()?;
    let den = BigInt::from_str(value.get("den")?.as_str()?).ok()?;
    (den != BigInt::from(0)).then(|| Rational::new(num, den))
}

fn cell_to_json(cell: &Cell) -> Value {
    match cell {
        Cell::Empty => Value::Null,
        Cell::Text(s) => Value::String(s.clone()),
        Cell::Int(i) => json!(i),
        Cell::Exact(r) => exact_to_json(r),
        Cell::Float(f) if f.is_finite() => json!(f),
        Cell::Float(f) => Value::String(f.to_string()),
        Cell::Bool(b) => json!(b),
    }
}

fn cell_from_json(value: &Value, kind: ColumnKind) -> Option<Cell> {
    if value.is_null() {
        return Some(Cell::Empty);
    }
    Some(match kind {
        ColumnKind::Text => Cell::Text(value.as_str()?.to_string()),
        ColumnKind::Int => Cell::Int(value.as_i64()?),
        ColumnKind::Exact => Cell::Exact(exact_from_json(value)?),
        ColumnKind::Float => match value {
            Value::String(s) => Cell::Float(s.parse().ok()?),
            other => Cell::Float(other.as_f64()?),
        },
        ColumnKind::Bool => Cell::Bool(value.as_bool()?),
    })
}

/// Rows plus metadata, written as CSV or JSON.
#[derive(Clone, Debug, PartialEq)]
pub struct Report {
    pub columns: Vec<Column>,
    pub rows: Vec<Vec<Cell>>,
    pub config: Value,
    pub summary: Value,
}

impl Report {
    pub fn new(columns: Vec<Column>) -> Self {
        Report {
            columns,
            rows: Vec::new(),
            config: Value::Null,
            summary: Value::Null,
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> Result<String, csv::Error> {
        let mut writer = csv::Writer::from_writer(Vec::new());
        writer.write_record(self.columns.iter().map(|c| c.name))?;
        for row in &self.rows {
            writer.write_record(row.iter().map(cell_to_csv))?;
        }
        let bytes = writer
            .into_inner()
            .map_err(|e| csv::Error::from(e.into_error()))?;
        Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
    }

    pub fn to_json(&self) -> Value {
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|row| {
                let mut obj = Map::new();
                for (col, cell) in self.columns.iter().zip(row) {
                    obj.insert(col.name.to_string(), cell_to_json(cell));
                }
                Value::Object(obj)
            })
            .collect();
        json!({"config": self.config, "rows": rows, "summary": self.summary})
    }

    /// Parses CSV written by [`Report::to_csv`] with the given schema.
    pub fn rows_from_csv(columns: &[Column], text: &str) -> Result<Vec<Vec<Cell>>, ParseError> {
        let mut reader = csv::Reader::from_reader(text.as_bytes());
        let header: Vec<String> = reader.headers()?.iter().map(str::to_string).collect();
        let expected: Vec<String> = columns.iter().map(|c| c.name.to_string()).collect();
        if header != expected {
            return Err(ParseError::Header {
                found: header,
                expected,
            });
        }
        reader
            .records()
            .enumerate()
            .map(|(row, record)| {
                let record = record?;
                columns
                    .iter()
                    .zip(record.iter())
                    .map(|(col, text)| {
                        cell_from_csv(text, col.kind).ok_or_else(|| ParseError::Cell {
                            row,
                            column: col.name,
                            text: text.to_string(),
                        })
                    })
                    .collect()
            })
            .collect()
    }

    /// Parses the `rows` array of JSON written by [`Report::to_json`].
    pub fn rows_from_json(columns: &[Column], text: &str) -> Result<Vec<Vec<Cell>>, ParseError> {
        let doc: Value = serde_json::from_str(text)?;
        let rows = doc
            .get("rows")
            .and_then(Value::as_array)
            .cloned()
            .unwrap_or_default();
        rows.iter()
            .enumerate()
            .map(|(row, obj)| {
                columns
                    .iter()
                    .map(|col| {
                        let value = obj.get(col.name).unwrap_or(&Value::Null);
                        cell_from_json(value, col.kind).ok_or_else(|| ParseError::Cell {
                            row,
                            column: col.name,
                            text: value.to_string(),
                        })
                    })
                    .collect()
            })
            .collect()
    }
}
