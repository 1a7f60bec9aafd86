//! Flat tables and their CSV / JSON-lines encodings.
//!
//! Floats are written as `{:.16e}` (17 significant digits), so a parsed table
//! holds exactly the values that were written and re-exports byte-identically.
//! Integers are written without exponent and parse back as integers. CSV files
//! start with a header row; JSON-lines files start with a
//! `{"columns":[...]}` line followed by one object per row, keys in column
//! order. An empty table is just the header.

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use serde_json::{Map, Value};
use thiserror::Error;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    Float(f64),
    Text(String),
}

impl Cell {
    fn encode(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Float(f) if f.is_nan() => "NaN".into(),
            Cell::Float(f) => format!("{f:.16e}"),
            Cell::Text(s) => s.clone(),
        }
    }

    fn decode(s: &str) -> Cell {
        if let Ok(i) = s.parse::<i64>() {
            return Cell::Int(i);
        }
        if s.contains(['e', 'E']) || s == "NaN" || s.ends_with("inf") {
            if let Ok(f) = s.parse::<f64>() {
                return Cell::Float(f);
            }
        }
        Cell::Text(s.to_string())
    }

    fn to_json(&self) -> String {
        match self {
            Cell::Float(f) if !f.is_finite() => "null".into(),
            Cell::Text(s) => Value::String(s.clone()).to_string(),
            c => c.encode(),
        }
    }

    fn from_json(v: &Value) -> Option<Cell> {
        Some(match v {
            Value::Null => Cell::Float(f64::NAN),
            Value::Number(n) if n.is_i64() => Cell::Int(n.as_i64()?),
            Value::Number(n) => Cell::Float(n.as_f64()?),
            Value::String(s) => Cell::Text(s.clone()),
            _ => return None,
        })
    }

    pub fn as_f64(&self) -> Option<f64> {
        match *self {
            Cell::Int(i) => Some(i as f64),
            Cell::Float(f) => Some(f),
            Cell::Text(_) => None,
        }
    }
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Float(v)
    }
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

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Format {
    Csv,
    JsonLines,
}

impl Format {
    /// `.jsonl` and `.json` mean JSON lines; anything else is CSV.
    pub fn from_path(path: &Path) -> Format {
        match path.extension().and_then(|e| e.to_str()) {
            Some("jsonl" | "json") => Format::JsonLines,
            _ => Format::Csv,
        }
    }
}

#[derive(Debug, Error)]
pub enum TableError {
    #[error(transparent)]
    Io(#[from] io::Error),
    #[error("line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Table { columns: columns.into_iter().map(Into::into).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match the header");
        self.rows.push(row);
    }

    pub fn column_index(&self, name: &str) -> Option<usize> {
        self.columns.iter().position(|c| c == name)
    }

    /// Numeric values of one column.
    pub fn column_f64(&self, name: &str) -> Option<Vec<f64>> {
        let k = self.column_index(name)?;
        self.rows.iter().map(|r| r[k].as_f64()).collect()
    }

    pub fn to_csv(&self) -> String {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::Any(b'\n')).from_writer(Vec::new());
        w.write_record(&self.columns).expect("writing to memory");
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::encode)).expect("writing to memory");
        }
        String::from_utf8(w.into_inner().expect("writing to memory")).expect("csv output is utf-8")
    }

    pub fn from_csv(text: &str) -> Result<Table, TableError> {
        let mut r = csv::ReaderBuilder::new().has_headers(true).from_reader(text.as_bytes());
        let err = |line: usize, msg: String| TableError::Parse { line, msg };
        let columns: Vec<String> = r.headers().map_err(|e| err(1, e.to_string()))?.iter().map(String::from).collect();
        let mut table = Table::new(columns);
        for (i, rec) in r.records().enumerate() {
            let rec = rec.map_err(|e| err(i + 2, e.to_string()))?;
            table.rows.push(rec.iter().map(Cell::decode).collect());
        }
        Ok(table)
    }

    pub fn to_json_lines(&self) -> String {
        let header = Value::Object(Map::from_iter([(
            "columns".to_string(),
            Value::Array(self.columns.iter().cloned().map(Value::String).collect()),
        )]));
        let mut out = header.to_string();
        out.push('\n');
        for row in &self.rows {
            out.push('{');
            for (k, (name, cell)) in self.columns.iter().zip(row).enumerate() {
                if k > 0 {
                    out.push(',');
                }
                let _ = write!(out, "{}:{}", Value::String(name.clone()), cell.to_json());
            }
            out.push_str("}\n");
        }
        out
    }

    pub fn from_json_lines(text: &str) -> Result<Table, TableError> {
        let err = |line: usize, msg: &str| TableError::Parse { line, msg: msg.to_string() };
        let mut lines = text.lines().enumerate().filter(|(_, l)| !l.trim().is_empty());
        let (_, first) = lines.next().ok_or_else(|| err(1, "missing header line"))?;
        let header: Value = serde_json::from_str(first).map_err(|e| err(1, &e.to_string()))?;
        let columns: Vec<String> = header
            .get("columns")
            .and_then(Value::as_array)
            .and_then(|a| a.iter().map(|v| v.as_str().map(String::from)).collect())
            .ok_or_else(|| err(1, "header must be {\"columns\":[...]}"))?;
        let mut table = Table::new(columns);
        for (i, line) in lines {
            let obj: Map<String, Value> = serde_json::from_str(line).map_err(|e| err(i + 1, &e.to_string()))?;
            let mut row = Vec::with_capacity(table.columns.len());
            for c in &table.columns {
                let v = obj.get(c).ok_or_else(|| err(i + 1, &format!("missing column {c}")))?;
                row.push(Cell::from_json(v).ok_or_else(|| err(i + 1, &format!("bad value in column {c}")))?);
            }
            if obj.len() != table.columns.len() {
                return Err(err(i + 1, "unexpected extra columns"));
            }
            table.rows.push(row);
        }
        Ok(table)
    }

    pub fn encode(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::JsonLines => self.to_json_lines(),
        }
    }

    pub fn decode(text: &str, format: Format) -> Result<Table, TableError> {
        match format {
            Format::Csv => Table::from_csv(text),
            Format::JsonLines => Table::from_json_lines(text),
        }
    }

    /// Writes the table in the format implied by the file extension.
    pub fn write_to(&self, path: &Path) -> io::Result<()> {
        fs::write(path, self.encode(Format::from_path(path)))
    }

    pub fn read_from(path: &Path) -> Result<Table, TableError> {
        Table::decode(&fs::read_to_string(path)?, Format::from_path(path))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["label", "seed", "value"]);
        t.push(vec!["CFA".into(), 3u64.into(), 0.1f64.into()]);
        t.push(vec!["a,\"b\"".into(), 4u64.into(), (-1.0f64 / 3.0).into()]);
        t.push(vec!["x".into(), 5u64.into(), f64::NAN.into()]);
        t
    }

    #[test]
    fn empty_table_is_header_only() {
        let t = Table::new(["a", "b"]);
        assert_eq!(t.to_csv(), "a,b\n");
        assert_eq!(t.to_json_lines(), "{\"columns\":[\"a\",\"b\"]}\n");
        assert_eq!(Table::from_csv(&t.to_csv()).unwrap(), t);
        assert_eq!(Table::from_json_lines(&t.to_json_lines()).unwrap(), t);
    }

    #[test]
    fn round_trip_is_byte_identical() {
        for f in [Format::Csv, Format::JsonLines] {
            let text = sample().encode(f);
            let back = Table::decode(&text, f).unwrap();
            assert_eq!(back.encode(f), text);
            assert_eq!(back.rows[1][2], Cell::Float(-1.0 / 3.0));
        }
    }

    #[test]
    fn json_lines_rejects_missing_column() {
        let text = "{\"columns\":[\"a\",\"b\"]}\n{\"a\":1}\n";
        assert!(matches!(Table::from_json_lines(text), Err(TableError::Parse { line: 2, .. })));
    }
}
