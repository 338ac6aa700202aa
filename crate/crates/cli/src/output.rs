//! CSV and JSON rendering.

use clap::ValueEnum;
use rdiv_core::Scalar;
use serde_json::{json, Map, Value};

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

pub enum Output {
    /// A single value: bare in CSV, `{key: value}` in JSON.
    Value { key: &'static str, value: String },
    /// A list of names: one per line in CSV, an array in JSON.
    List { key: &'static str, items: Vec<String> },
    Table { headers: Vec<&'static str>, rows: Vec<Vec<String>> },
    /// Hilbert rows: the CSV `normalized` column is a 20-digit decimal, the
    /// JSON one is exact.
    Hilbert(Vec<(Scalar, u64, Scalar)>),
    Custom { csv: Box<Output>, json: Value },
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

impl Output {
    pub fn value(key: &'static str, value: String) -> Self {
        Output::Value { key, value }
    }

    pub fn list(key: &'static str, items: Vec<String>) -> Self {
        Output::List { key, items }
    }

    pub fn table(headers: &[&'static str], rows: Vec<Vec<String>>) -> Self {
        Output::Table { headers: headers.to_vec(), rows }
    }

    pub fn hilbert(rows: Vec<(Scalar, u64, Scalar)>) -> Self {
        Output::Hilbert(rows)
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.csv(),
            Format::Json => {
                let mut s = serde_json::to_string_pretty(&self.json()).expect("output serializes");
                s.push('\n');
                s
            }
        }
    }

    fn csv(&self) -> String {
        let line = |cells: &[String]| cells.iter().map(|c| csv_field(c)).collect::<Vec<_>>().join(",") + "\n";
        match self {
            Output::Value { value, .. } => format!("{value}\n"),
            Output::List { items, .. } => items.iter().map(|i| format!("{i}\n")).collect(),
            Output::Table { headers, rows } => {
                let head: Vec<String> = headers.iter().map(|h| h.to_string()).collect();
                std::iter::once(line(&head)).chain(rows.iter().map(|r| line(r))).collect()
            }
            Output::Hilbert(rows) => {
                let mut out = String::from("m,h0,normalized\n");
                for (m, h, n) in rows {
                    out += &line(&[m.to_string(), h.to_string(), n.to_decimal(20)]);
                }
                out
            }
            Output::Custom { csv, .. } => csv.csv(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Output::Value { key, value } => json!({ *key: value }),
            Output::List { key, items } => json!({ *key: items }),
            Output::Table { headers, rows } => Value::Array(
                rows.iter()
                    .map(|r| {
                        let obj: Map<String, Value> =
                            headers.iter().zip(r).map(|(h, c)| (h.to_string(), Value::String(c.clone()))).collect();
                        Value::Object(obj)
                    })
                    .collect(),
            ),
            Output::Hilbert(rows) => Value::Array(
                rows.iter().map(|(m, h, n)| json!({ "m": m.to_string(), "h0": h, "normalized": n.to_string() })).collect(),
            ),
            Output::Custom { json, .. } => json.clone(),
        }
    }
}
