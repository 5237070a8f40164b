//! Result tables and their CSV / JSON encodings.
//!
//! CSV files start with `#`-prefixed metadata lines, then a header row.
//! Numbers use Rust's shortest round-trip formatting so reruns are
//! byte-identical.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value};

use crate::error::{CliError, CliResult};

pub const DB_NOTE: &str = "dB = 10*log10(power ratio); rates in rad/us, times in us";

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Empty,
}

impl Cell {
    pub fn text(s: impl Into<String>) -> Self {
        Cell::Text(s.into())
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::Num(x) => Some(*x),
            Cell::Int(i) => Some(*i as f64),
            _ => None,
        }
    }

    fn render(&self) -> String {
        match self {
            Cell::Num(x) if x.is_nan() => "nan".into(),
            Cell::Num(x) if x.is_infinite() => if *x > 0.0 { "inf" } else { "-inf" }.into(),
            Cell::Num(x) => format!("{x:?}"),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn to_json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map(Value::Number).unwrap_or_else(|| Value::String(self.render())),
            Cell::Int(i) => Value::from(*i),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Num(x)
    }
}

impl From<usize> for Cell {
    fn from(i: usize) -> Self {
        Cell::Int(i as i64)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

#[derive(Clone, Debug, Default, PartialEq)]
pub struct Table {
    pub meta: Vec<(String, String)>,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Deserialize, serde::Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

impl Format {
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("json") => Format::Json,
            _ => Format::Csv,
        }
    }
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { meta: vec![("units".into(), DB_NOTE.into())], columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn meta(&mut self, key: &str, value: impl ToString) -> &mut Self {
        self.meta.push((key.to_string(), value.to_string()));
        self
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of a column, `None` for non-numeric cells.
    pub fn values(&self, name: &str) -> Option<Vec<Option<f64>>> {
        let k = self.column(name)?;
        Some(self.rows.iter().map(|r| r[k].as_f64()).collect())
    }

    pub fn to_csv(&self) -> CliResult<String> {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::Writer::from_writer(Vec::new());
        w.write_record(&self.columns)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::render))?;
        }
        let bytes = w.into_inner().map_err(|e| CliError::Format(e.to_string()))?;
        out.push_str(&String::from_utf8(bytes).map_err(|e| CliError::Format(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self) -> CliResult<String> {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), Value::String(v.clone()))).collect();
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| Value::Object(self.columns.iter().cloned().zip(r.iter().map(Cell::to_json)).collect()))
            .collect();
        let doc = serde_json::json!({ "meta": meta, "columns": self.columns, "rows": rows });
        Ok(serde_json::to_string_pretty(&doc)? + "\n")
    }

    pub fn write(&self, path: &Path, format: Format) -> CliResult<()> {
        let text = match format {
            Format::Csv => self.to_csv()?,
            Format::Json => self.to_json()?,
        };
        if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
            fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))?;
        }
        let mut f = fs::File::create(path).map_err(|e| CliError::io(path, e))?;
        f.write_all(text.as_bytes()).map_err(|e| CliError::io(path, e))
    }

    /// Parses a CSV produced by [`Table::to_csv`]; cells that parse as
    /// numbers come back as `Num`.
    pub fn from_csv(text: &str) -> CliResult<Table> {
        let mut meta = Vec::new();
        let mut body = String::new();
        for line in text.lines() {
            if let Some(m) = line.strip_prefix("# ") {
                if let Some((k, v)) = m.split_once(": ") {
                    meta.push((k.to_string(), v.to_string()));
                }
            } else {
                body.push_str(line);
                body.push('\n');
            }
        }
        let mut r = csv::Reader::from_reader(body.as_bytes());
        let columns = r.headers()?.iter().map(str::to_string).collect();
        let mut rows = Vec::new();
        for rec in r.records() {
            rows.push(
                rec?.iter()
                    .map(|s| match s {
                        "" => Cell::Empty,
                        _ => s.parse::<f64>().map(Cell::Num).unwrap_or_else(|_| Cell::text(s)),
                    })
                    .collect(),
            );
        }
        Ok(Table { meta, columns, rows })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn csv_round_trip_keeps_values_exactly() {
        let mut t = Table::new(&["x", "status", "y"]);
        t.meta("scheme", "bi");
        t.push(vec![Cell::Num(0.1 + 0.2), Cell::text("ok"), Cell::Num(-1.5e-300)]);
        t.push(vec![Cell::Num(f64::NAN), Cell::text("above_threshold"), Cell::Empty]);
        let text = t.to_csv().unwrap();
        assert!(text.starts_with("# units: dB = 10*log10"));
        let back = Table::from_csv(&text).unwrap();
        assert_eq!(back.columns, t.columns);
        assert_eq!(back.rows[0][0], Cell::Num(0.1 + 0.2));
        assert_eq!(back.rows[0][2], Cell::Num(-1.5e-300));
        assert!(matches!(back.rows[1][0], Cell::Num(x) if x.is_nan()));
        assert_eq!(back.rows[1][2], Cell::Empty);
        assert_eq!(back.meta, t.meta);
    }

    #[test]
    fn json_rows_are_objects() {
        let mut t = Table::new(&["a", "b"]);
        t.push(vec![Cell::Int(3), Cell::Num(f64::INFINITY)]);
        let v: Value = serde_json::from_str(&t.to_json().unwrap()).unwrap();
        assert_eq!(v["rows"][0]["a"], 3);
        assert_eq!(v["rows"][0]["b"], "inf");
    }
}
