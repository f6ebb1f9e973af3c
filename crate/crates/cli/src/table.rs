//! Tables and their CSV/JSON rendering.

use std::io::Write;

use serde_json::{Map, Number, Value};
use ssmp::output::format_sig17;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<String> for Cell {
    fn from(s: String) -> Self {
        Cell::Text(s)
    }
}

impl Cell {
    fn render(&self) -> String {
        match self {
            Cell::Num(x) => format_sig17(*x),
            Cell::Text(s) => s.clone(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default)]
pub struct Table {
    pub header: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(header: &[&str]) -> Self {
        Table {
            header: header.iter().map(|h| h.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.header.len());
        self.rows.push(row);
    }

    pub fn write_csv<W: Write>(&self, w: W) -> csv::Result<()> {
        let mut out = csv::Writer::from_writer(w);
        out.write_record(&self.header)?;
        for row in &self.rows {
            out.write_record(row.iter().map(Cell::render))?;
        }
        out.flush()?;
        Ok(())
    }

    pub fn to_json(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .header
                        .iter()
                        .zip(row)
                        .map(|(h, c)| {
                            let v = match c {
                                Cell::Num(x) => float(*x),
                                Cell::Text(s) => Value::String(s.clone()),
                            };
                            (h.clone(), v)
                        })
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// A JSON number with 17 significant digits; null when not finite.
pub fn float(x: f64) -> Value {
    if !x.is_finite() {
        return Value::Null;
    }
    format_sig17(x)
        .parse::<Number>()
        .map(Value::Number)
        .unwrap_or(Value::Null)
}

/// Rewrites every non-integer number in a serialized value at 17 significant digits.
pub fn normalize_floats(v: Value) -> Value {
    match v {
        Value::Number(n) if !(n.is_i64() || n.is_u64()) => n.as_f64().map_or(Value::Number(n), float),
        Value::Array(items) => Value::Array(items.into_iter().map(normalize_floats).collect()),
        Value::Object(map) => Value::Object(map.into_iter().map(|(k, v)| (k, normalize_floats(v))).collect()),
        other => other,
    }
}
