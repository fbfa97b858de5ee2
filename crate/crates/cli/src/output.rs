//! Tabular reports in CSV or JSON-lines form.
//!
//! CSV: `#`-prefixed provenance lines, then one block per table introduced by
//! `# table=<name>` with a header row. JSON lines: one `"table":"provenance"`
//! object, then one object per row carrying its table name.

use std::fs::File;
use std::io::{self, Write};
use std::path::Path;

use clap::ValueEnum;
use serde_json::{Map, Number, Value as Json};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Jsonl,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(i64),
    UInt(u64),
    Float(f64),
    Text(String),
    Bool(bool),
    Empty,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        Cell::Float(x)
    }
}

impl From<u64> for Cell {
    fn from(x: u64) -> Self {
        Cell::UInt(x)
    }
}

impl From<usize> for Cell {
    fn from(x: usize) -> Self {
        Cell::Int(x as i64)
    }
}

impl From<bool> for Cell {
    fn from(x: bool) -> Self {
        Cell::Bool(x)
    }
}

impl From<&str> for Cell {
    fn from(x: &str) -> Self {
        Cell::Text(x.to_string())
    }
}

impl From<String> for Cell {
    fn from(x: String) -> Self {
        Cell::Text(x)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(x: Option<T>) -> Self {
        x.map_or(Cell::Empty, Into::into)
    }
}

/// Non-finite floats have no JSON number form; both emitters spell them the
/// same way (`inf`, `-inf`, `NaN`).
fn float_text(x: f64) -> String {
    if x.is_nan() {
        "NaN".into()
    } else if x.is_infinite() {
        if x > 0.0 { "inf" } else { "-inf" }.into()
    } else {
        format!("{x:?}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::UInt(u) => u.to_string(),
            Cell::Float(x) => float_text(*x),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Json {
        match self {
            Cell::Int(i) => Json::from(*i),
            Cell::UInt(u) => Json::from(*u),
            Cell::Float(x) => Number::from_f64(*x).map_or_else(|| Json::String(float_text(*x)), Json::Number),
            Cell::Text(s) => Json::String(s.clone()),
            Cell::Bool(b) => Json::Bool(*b),
            Cell::Empty => Json::Null,
        }
    }
}

#[derive(Debug, Clone)]
pub struct Table {
    pub name: String,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &str, columns: &[&str]) -> Self {
        Self {
            name: name.into(),
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len(), "table {}", self.name);
        self.rows.push(row);
    }
}

/// A command's full output: provenance key/value pairs and tables.
#[derive(Debug, Clone, Default)]
pub struct Report {
    pub provenance: Vec<(String, String)>,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn new(command: &str) -> Self {
        let mut r = Self::default();
        r.param("toolkit", "clickkit");
        r.param("version", env!("CARGO_PKG_VERSION"));
        r.param("command", command);
        r
    }

    pub fn param(&mut self, key: &str, value: impl ToString) {
        self.provenance.push((key.into(), value.to_string()));
    }

    pub fn table(&mut self, table: Table) {
        self.tables.push(table);
    }

    pub fn emit(&self, format: Format, out: Option<&Path>) -> io::Result<()> {
        let text = match format {
            Format::Csv => self.to_csv()?,
            Format::Jsonl => self.to_jsonl(),
        };
        match out {
            Some(path) => File::create(path)?.write_all(text.as_bytes()),
            None => io::stdout().lock().write_all(text.as_bytes()),
        }
    }

    fn to_csv(&self) -> io::Result<String> {
        let mut s = String::new();
        for (k, v) in &self.provenance {
            s.push_str(&format!("# {k}={}\n", v.replace('\n', " ")));
        }
        for table in &self.tables {
            s.push_str(&format!("\n# table={}\n", table.name));
            let mut w = csv::Writer::from_writer(Vec::new());
            w.write_record(&table.columns)?;
            for row in &table.rows {
                w.write_record(row.iter().map(Cell::csv))?;
            }
            let bytes = w.into_inner().map_err(|e| e.into_error())?;
            s.push_str(&String::from_utf8(bytes).map_err(|e| io::Error::new(io::ErrorKind::InvalidData, e))?);
        }
        Ok(s)
    }

    fn to_jsonl(&self) -> String {
        let mut s = String::new();
        let mut head = Map::new();
        head.insert("table".into(), "provenance".into());
        for (k, v) in &self.provenance {
            head.insert(k.clone(), Json::String(v.clone()));
        }
        s.push_str(&Json::Object(head).to_string());
        s.push('\n');
        for table in &self.tables {
            for row in &table.rows {
                let mut obj = Map::new();
                obj.insert("table".into(), Json::String(table.name.clone()));
                for (col, cell) in table.columns.iter().zip(row) {
                    obj.insert(col.clone(), cell.json());
                }
                s.push_str(&Json::Object(obj).to_string());
                s.push('\n');
            }
        }
        s
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Report {
        let mut r = Report::new("test");
        r.param("seed", 3);
        let mut t = Table::new("t", &["label", "x", "n", "flag", "missing"]);
        t.push(vec!["a,b".into(), 0.1.into(), 3usize.into(), true.into(), Cell::Empty]);
        t.push(vec!["c".into(), f64::INFINITY.into(), 4usize.into(), false.into(), None::<f64>.into()]);
        r.table(t);
        r
    }

    #[test]
    fn csv_layout() {
        let text = sample().to_csv().unwrap();
        assert!(text.starts_with("# toolkit=clickkit\n# version="));
        assert!(text.contains("# seed=3\n\n# table=t\nlabel,x,n,flag,missing\n\"a,b\",0.1,3,true,\nc,inf,4,false,\n"));
    }

    #[test]
    fn jsonl_layout() {
        let text = sample().to_jsonl();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 3);
        let row: Json = serde_json::from_str(lines[2]).unwrap();
        assert_eq!(row["table"], "t");
        assert_eq!(row["x"], "inf");
        assert_eq!(row["missing"], Json::Null);
        let first: Json = serde_json::from_str(lines[1]).unwrap();
        assert_eq!(first["x"].as_f64(), Some(0.1));
    }
}
