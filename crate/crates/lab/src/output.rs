//! Deterministic CSV and JSON writers.

use crate::error::LabResult;
use serde::Serialize;
use std::fs;
use std::path::Path;

/// A table cell.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    F(f64),
    I(i64),
    S(String),
    B(bool),
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::F(v)
    }
}
impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::I(v as i64)
    }
}
impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::I(v as i64)
    }
}
impl From<u8> for Cell {
    fn from(v: u8) -> Self {
        Cell::I(v as i64)
    }
}
impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::B(v)
    }
}
impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::S(v.to_string())
    }
}
impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::S(v)
    }
}
impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(x) => Cell::F(x),
            None => Cell::S(String::new()),
        }
    }
}

/// Shortest round-trip float text (`NaN`, `inf`, `-inf` for non-finite values).
pub fn fmt_f64(v: f64) -> String {
    if v.is_nan() {
        "NaN".into()
    } else if v.is_infinite() {
        if v > 0.0 { "inf".into() } else { "-inf".into() }
    } else {
        format!("{v:?}")
    }
}

impl Cell {
    fn text(&self) -> String {
        match self {
            Cell::F(v) => fmt_f64(*v),
            Cell::I(v) => v.to_string(),
            Cell::S(s) => s.clone(),
            Cell::B(b) => b.to_string(),
        }
    }

    pub fn as_f64(&self) -> Option<f64> {
        match self {
            Cell::F(v) => Some(*v),
            Cell::I(v) => Some(*v as f64),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self { columns: columns.iter().map(|c| c.to_string()).collect(), rows: Vec::new() }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let i = self.columns.iter().position(|c| c == name)?;
        Some(self.rows.iter().map(|r| &r[i]).collect())
    }
}

/// CSV with a `#` preamble line carrying the config hash and the column list.
pub fn write_csv(path: &Path, table: &Table, config_hash: &str) -> LabResult<()> {
    let mut buf = format!("# config_hash={config_hash} columns={}\n", table.columns.join(";")).into_bytes();
    {
        let mut w = csv::WriterBuilder::new().terminator(csv::Terminator::CRLF).from_writer(&mut buf);
        w.write_record(&table.columns)?;
        for row in &table.rows {
            w.write_record(row.iter().map(|c| c.text()))?;
        }
        w.flush()?;
    }
    fs::write(path, buf)?;
    Ok(())
}

/// Pretty JSON with object keys sorted.
pub fn to_sorted_json<T: Serialize>(v: &T) -> LabResult<String> {
    let value = serde_json::to_value(v)?;
    Ok(serde_json::to_string_pretty(&value)? + "\n")
}

pub fn write_json<T: Serialize>(path: &Path, v: &T) -> LabResult<()> {
    fs::write(path, to_sorted_json(v)?)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_round_trip() {
        for v in [0.1, 1e-20, 123456.789, -2.5e300, 1.0] {
            assert_eq!(fmt_f64(v).parse::<f64>().unwrap(), v);
        }
        assert_eq!(fmt_f64(f64::NAN), "NaN");
    }

    #[test]
    fn json_keys_sorted() {
        let v = serde_json::json!({"b": 1, "a": {"d": 2, "c": 3}});
        let s = to_sorted_json(&v).unwrap();
        assert!(s.find("\"a\"").unwrap() < s.find("\"b\"").unwrap());
        assert!(s.find("\"c\"").unwrap() < s.find("\"d\"").unwrap());
    }
}
