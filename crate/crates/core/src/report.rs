//! Tabular output shared by the command-line tools.
//!
//! CSV: header row, comma separator, LF line endings, numbers in `{:.16e}`
//! (17 significant digits, enough to round-trip any `f64`), empty cells for
//! missing values. JSON: one object `{config, data, metadata}` where `data`
//! holds one object per row.

use std::io::{self, Write};

use serde_json::{Map, Value};

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(i64),
    Text(String),
    Bool(bool),
    Missing,
}

impl From<f64> for Cell {
    fn from(v: f64) -> Self {
        Cell::Num(v)
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        v.map_or(Cell::Missing, Cell::Num)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_owned())
    }
}

impl From<String> for Cell {
    fn from(v: String) -> Self {
        Cell::Text(v)
    }
}

impl From<usize> for Cell {
    fn from(v: usize) -> Self {
        Cell::Int(v as i64)
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(v) if v.is_finite() => format!("{v:.16e}"),
            Cell::Num(v) => v.to_string(),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Missing => String::new(),
            Cell::Text(s) if s.contains([',', '"', '\n']) => format!("\"{}\"", s.replace('"', "\"\"")),
            Cell::Text(s) => s.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(v) => serde_json::Number::from_f64(*v).map_or(Value::Null, Value::Number),
            Cell::Int(v) => Value::from(*v),
            Cell::Bool(v) => Value::Bool(*v),
            Cell::Text(s) => Value::String(s.clone()),
            Cell::Missing => Value::Null,
        }
    }
}

/// Rows with a fixed header.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Table {
    columns: Vec<String>,
    rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn columns(&self) -> &[String] {
        &self.columns
    }

    pub fn rows(&self) -> &[Vec<Cell>] {
        &self.rows
    }

    /// Panics if `row` does not match the header width.
    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width does not match header");
        self.rows.push(row);
    }

    /// Appends all rows of `other`, which must share this header.
    pub fn extend(&mut self, other: Table) {
        assert_eq!(self.columns, other.columns, "headers differ");
        self.rows.extend(other.rows);
    }

    pub fn write_csv<W: Write>(&self, mut out: W) -> io::Result<()> {
        writeln!(out, "{}", self.columns.join(","))?;
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            writeln!(out, "{}", line.join(","))?;
        }
        Ok(())
    }

    pub fn to_csv(&self) -> String {
        let mut buf = Vec::new();
        self.write_csv(&mut buf).expect("writing to a Vec cannot fail");
        String::from_utf8(buf).expect("csv output is utf-8")
    }

    pub fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> =
                        self.columns.iter().cloned().zip(row.iter().map(Cell::json)).collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// `{config, data, metadata}`, pretty-printed with a trailing newline.
pub fn json_document(config: Value, table: &Table, metadata: Value) -> String {
    let mut doc = Map::new();
    doc.insert("config".into(), config);
    doc.insert("data".into(), table.to_json_rows());
    doc.insert("metadata".into(), metadata);
    let mut s = serde_json::to_string_pretty(&Value::Object(doc)).expect("json values always serialize");
    s.push('\n');
    s
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new(["tau", "ige", "note"]);
        t.push(vec![0.0.into(), None.into(), "start".into()]);
        t.push(vec![0.1.into(), Some(-1.5).into(), "a,b".into()]);
        t
    }

    #[test]
    fn csv_layout() {
        let csv = sample().to_csv();
        assert_eq!(
            csv,
            "tau,ige,note\n\
             0.0000000000000000e0,,start\n\
             1.0000000000000001e-1,-1.5000000000000000e0,\"a,b\"\n"
        );
        assert!(!csv.contains('\r'));
    }

    #[test]
    fn csv_round_trips_floats() {
        for v in [0.1, 1.0 / 3.0, std::f64::consts::PI * 1e-300, 1.7976931348623157e308] {
            let s = Cell::Num(v).csv();
            assert_eq!(s.parse::<f64>().unwrap(), v);
        }
    }

    #[test]
    fn json_layout() {
        let doc = json_document(serde_json::json!({"k": 1}), &sample(), serde_json::json!({}));
        let v: Value = serde_json::from_str(&doc).unwrap();
        assert_eq!(v["config"]["k"], 1);
        assert_eq!(v["data"][0]["ige"], Value::Null);
        assert_eq!(v["data"][1]["ige"], -1.5);
        assert_eq!(v["data"].as_array().unwrap().len(), 2);
    }

    #[test]
    #[should_panic]
    fn rejects_ragged_rows() {
        Table::new(["a", "b"]).push(vec![1.0.into()]);
    }
}
