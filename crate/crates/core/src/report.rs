//! CSV and JSON emission for tables and trial reports.
//!
//! Every document carries the schema tag [`SCHEMA`]: a `schema` column in
//! CSV, a leading `schema` field in JSON. Fields keep their declaration
//! order and floats are rounded to 12 significant digits, so re-emitting a
//! parsed document reproduces it byte for byte.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use serde_json::{Map, Number, Value};

use crate::error::{Error, Result};
use crate::sampler::TrialReport;

pub const SCHEMA: &str = "QSR1";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl FromStr for Format {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(Format::Csv),
            "json" => Ok(Format::Json),
            _ => Err(Error::Domain(format!("unknown format '{s}' (csv or json)"))),
        }
    }
}

impl fmt::Display for Format {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Format::Csv => "csv",
            Format::Json => "json",
        })
    }
}

/// `x` rounded to 12 significant digits.
pub fn round12(x: f64) -> f64 {
    if x.is_finite() {
        format!("{x:.11e}").parse().unwrap_or(x)
    } else {
        x
    }
}

/// Shortest text for `round12(x)`.
pub fn fmt_float(x: f64) -> String {
    match Number::from_f64(round12(x)) {
        Some(num) => num.to_string(),
        None if x.is_nan() => "nan".into(),
        None if x > 0.0 => "inf".into(),
        None => "-inf".into(),
    }
}

fn round_value(v: &mut Value) {
    match v {
        Value::Number(num) if num.is_f64() => {
            if let Some(r) = num.as_f64().and_then(|x| Number::from_f64(round12(x))) {
                *num = r;
            }
        }
        Value::Array(items) => items.iter_mut().for_each(round_value),
        Value::Object(map) => map.values_mut().for_each(round_value),
        _ => {}
    }
}

/// Serialize `value` with the schema tag in front and floats rounded.
/// Non-object values are wrapped as `{"schema": .., "data": ..}`.
pub fn to_json<T: Serialize>(value: &T) -> Result<String> {
    let mut v = serde_json::to_value(value)?;
    round_value(&mut v);
    let mut doc = Map::new();
    doc.insert("schema".into(), Value::String(SCHEMA.into()));
    match v {
        Value::Object(fields) => doc.extend(fields),
        other => {
            doc.insert("data".into(), other);
        }
    }
    let mut out = serde_json::to_string_pretty(&Value::Object(doc))?;
    out.push('\n');
    Ok(out)
}

/// Parse a document from [`to_json`], checking the schema tag.
pub fn from_json<T: for<'de> Deserialize<'de>>(text: &str) -> Result<T> {
    let mut v: Value = serde_json::from_str(text)?;
    let obj = v.as_object_mut().ok_or_else(|| Error::Report("expected a JSON object".into()))?;
    match obj.shift_remove("schema") {
        Some(Value::String(s)) if s == SCHEMA => {}
        Some(other) => return Err(Error::Report(format!("unsupported schema {other}"))),
        None => return Err(Error::Report("missing schema field".into())),
    }
    Ok(serde_json::from_value(v)?)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
    Missing,
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(x) => fmt_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Missing => String::new(),
        }
    }

    fn to_value(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            Cell::Float(x) => Number::from_f64(round12(*x)).map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Missing => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::Float)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.into())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

/// A rectangular table with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    /// What the rows describe, e.g. `scaling` or `reflection`.
    pub kind: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(kind: &str, columns: &[&str]) -> Self {
        Table { kind: kind.into(), columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) -> Result<()> {
        if row.len() != self.columns.len() {
            return Err(Error::Report(format!("row has {} cells for {} columns", row.len(), self.columns.len())));
        }
        self.rows.push(row);
        Ok(())
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }
}

fn write_csv(header: &[String], rows: impl Iterator<Item = Vec<String>>) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(std::iter::once("schema").chain(header.iter().map(String::as_str)))?;
    for row in rows {
        w.write_record(std::iter::once(SCHEMA.to_string()).chain(row))?;
    }
    let bytes = w.into_inner().map_err(|e| Error::Report(e.to_string()))?;
    String::from_utf8(bytes).map_err(|e| Error::Report(e.to_string()))
}

pub fn emit_table(table: &Table, format: Format) -> Result<String> {
    match format {
        Format::Csv => write_csv(&table.columns, table.rows.iter().map(|r| r.iter().map(Cell::render).collect())),
        Format::Json => {
            let rows: Vec<Value> = table
                .rows
                .iter()
                .map(|r| Value::Object(table.columns.iter().cloned().zip(r.iter().map(Cell::to_value)).collect()))
                .collect();
            let mut doc = Map::new();
            doc.insert("kind".into(), Value::String(table.kind.clone()));
            doc.insert("columns".into(), Value::from(table.columns.clone()));
            doc.insert("rows".into(), Value::Array(rows));
            to_json(&Value::Object(doc))
        }
    }
}

const TRIAL_COLUMNS: [&str; 12] = [
    "kind",
    "n",
    "g",
    "pi_g",
    "eps",
    "fidelity",
    "pi_star",
    "walk_calls",
    "ancilla_qubits",
    "events",
    "verdict",
    "seed",
];

/// One report as a JSON object with every field, or as a one-row CSV
/// where the transcript is summarised by its length.
pub fn emit_trial(report: &TrialReport, format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(report),
        Format::Csv => {
            let label = |v: &dyn erased::Label| v.label();
            let row = vec![
                label(&report.kind),
                report.n.to_string(),
                report.g.to_string(),
                fmt_float(report.pi_g),
                fmt_float(report.eps),
                fmt_float(report.fidelity),
                report.pi_star.map(fmt_float).unwrap_or_default(),
                report.walk_calls.to_string(),
                report.ancilla_qubits.to_string(),
                report.transcript.len().to_string(),
                label(&report.verdict),
                report.seed.to_string(),
            ];
            let header: Vec<String> = TRIAL_COLUMNS.iter().map(|c| c.to_string()).collect();
            write_csv(&header, std::iter::once(row))
        }
    }
}

/// Several reports: a JSON array of objects or a multi-row CSV.
pub fn emit_trials(reports: &[TrialReport], format: Format) -> Result<String> {
    match format {
        Format::Json => to_json(&reports),
        Format::Csv => {
            let mut out = String::new();
            for (i, r) in reports.iter().enumerate() {
                let doc = emit_trial(r, Format::Csv)?;
                // Keep the header from the first report only.
                let body = if i == 0 { doc.as_str() } else { doc.split_once('\n').map_or("", |(_, b)| b) };
                out.push_str(body);
            }
            if reports.is_empty() {
                let header: Vec<String> = TRIAL_COLUMNS.iter().map(|c| c.to_string()).collect();
                out = write_csv(&header, std::iter::empty())?;
            }
            Ok(out)
        }
    }
}

pub fn parse_trial(json: &str) -> Result<TrialReport> {
    from_json(json)
}

mod erased {
    use serde::Serialize;

    /// Lowercase serde name of a unit enum variant.
    pub trait Label {
        fn label(&self) -> String;
    }

    impl<T: Serialize> Label for T {
        fn label(&self) -> String {
            match serde_json::to_value(self) {
                Ok(serde_json::Value::String(s)) => s,
                _ => String::new(),
            }
        }
    }
}
