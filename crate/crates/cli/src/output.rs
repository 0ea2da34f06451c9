//! Series tables and number formatting shared by every writer.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use serde::Serialize;
use serde_json::value::RawValue;

use crate::scenario::Format;

/// 17 significant digits: enough for every `f64` to round-trip.
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "nan".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:.16e}")
    }
}

/// JSON number with 17 significant digits; `null` for NaN and infinities.
pub fn json_f64(v: f64) -> Box<RawValue> {
    let text = if v.is_finite() { format!("{v:.16e}") } else { "null".into() };
    RawValue::from_string(text).expect("formatted floats are valid JSON")
}

#[derive(Debug, Clone)]
pub enum Cell {
    Num(f64),
    Text(String),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: impl IntoIterator<Item = impl Into<String>>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let cells: Vec<String> = row
                .iter()
                .map(|c| match c {
                    Cell::Num(v) => fmt_f64(*v),
                    Cell::Text(s) => s.clone(),
                })
                .collect();
            let _ = writeln!(out, "{}", cells.join(","));
        }
        out
    }

    fn to_json(&self) -> String {
        #[derive(Serialize)]
        struct Doc<'a> {
            columns: &'a [String],
            rows: Vec<Vec<Box<RawValue>>>,
        }
        let rows = self
            .rows
            .iter()
            .map(|row| {
                row.iter()
                    .map(|c| match c {
                        Cell::Num(v) => json_f64(*v),
                        Cell::Text(s) => {
                            RawValue::from_string(serde_json::to_string(s).unwrap()).unwrap()
                        }
                    })
                    .collect()
            })
            .collect();
        let mut text = serde_json::to_string_pretty(&Doc { columns: &self.columns, rows }).unwrap();
        text.push('\n');
        text
    }
}

/// Named drift measurements, kept in a stable order.
pub type DriftSummary = BTreeMap<&'static str, f64>;

pub fn drift_json(d: &DriftSummary) -> BTreeMap<&'static str, Box<RawValue>> {
    d.iter().map(|(k, v)| (*k, json_f64(*v))).collect()
}
