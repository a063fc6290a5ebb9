//! Tables with a reproducibility header, written as CSV or JSON.
//!
//! CSV floats carry 17 significant digits and lines end in LF, so equal
//! inputs give byte-identical files on every platform.

use std::fs;
use std::io::Write;
use std::path::Path;

use serde_json::{Map, Value, json};

use crate::config::{Format, RunConfig};
use crate::error::CliError;

pub const TOOL: &str = concat!(env!("CARGO_PKG_NAME"), " ", env!("CARGO_PKG_VERSION"));

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(i) => i.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number),
            Cell::Int(i) => json!(i),
            Cell::Text(s) => json!(s),
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
        Cell::Int(i as u64)
    }
}

impl From<u64> for Cell {
    fn from(i: u64) -> Self {
        Cell::Int(i)
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

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map_or(Cell::Empty, Into::into)
    }
}

/// `d.dddddddddddddddde±x`: 17 significant digits, enough to round-trip.
pub fn format_float(x: f64) -> String {
    if x.is_finite() { format!("{x:.16e}") } else { x.to_string() }
}

/// Result of one command: header metadata plus a rectangular table.
#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub command: String,
    pub config: RunConfig,
    pub units: &'static str,
    /// Extra `key: value` header entries, in insertion order.
    pub meta: Vec<(String, Cell)>,
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(command: impl Into<String>, config: &RunConfig, units: &'static str, columns: &[&'static str]) -> Self {
        Self {
            command: command.into(),
            config: config.clone(),
            units,
            meta: Vec::new(),
            columns: columns.to_vec(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        assert_eq!(row.len(), self.columns.len(), "row width must match the header");
        self.rows.push(row);
    }

    pub fn meta(&mut self, key: impl Into<String>, value: impl Into<Cell>) {
        self.meta.push((key.into(), value.into()));
    }

    pub fn column(&self, name: &str) -> Option<Vec<&Cell>> {
        let k = self.columns.iter().position(|c| *c == name)?;
        Some(self.rows.iter().map(|r| &r[k]).collect())
    }

    fn header_lines(&self) -> Vec<(String, String)> {
        let mut lines = vec![
            ("tool".to_string(), TOOL.to_string()),
            ("command".to_string(), self.command.clone()),
            ("config".to_string(), self.config.to_json()),
            ("seed".to_string(), self.config.seed.to_string()),
            ("units".to_string(), self.units.to_string()),
        ];
        lines.extend(self.meta.iter().map(|(k, v)| (k.clone(), v.csv())));
        lines
    }

    pub fn to_csv(&self) -> Result<String, CliError> {
        let mut out = String::new();
        for (k, v) in self.header_lines() {
            out.push_str(&format!("# {k}: {v}\n"));
        }
        let mut w = csv::WriterBuilder::new()
            .terminator(csv::Terminator::Any(b'\n'))
            .from_writer(Vec::new());
        let fail = |e: csv::Error| CliError::Output(e.to_string());
        w.write_record(&self.columns).map_err(fail)?;
        for row in &self.rows {
            w.write_record(row.iter().map(Cell::csv)).map_err(fail)?;
        }
        let body = w.into_inner().map_err(|e| CliError::Output(e.to_string()))?;
        out.push_str(&String::from_utf8(body).map_err(|e| CliError::Output(e.to_string()))?);
        Ok(out)
    }

    pub fn to_json(&self) -> String {
        let mut header = Map::new();
        header.insert("tool".into(), json!(TOOL));
        header.insert("command".into(), json!(self.command));
        header.insert("config".into(), serde_json::to_value(&self.config).expect("config serializes"));
        header.insert("seed".into(), json!(self.config.seed));
        header.insert("units".into(), json!(self.units));
        for (k, v) in &self.meta {
            header.insert(k.clone(), v.json());
        }
        let rows: Vec<Value> = self
            .rows
            .iter()
            .map(|r| {
                let obj: Map<String, Value> = self.columns.iter().zip(r).map(|(c, v)| (c.to_string(), v.json())).collect();
                Value::Object(obj)
            })
            .collect();
        let doc = json!({ "header": header, "columns": self.columns, "rows": rows });
        let mut s = serde_json::to_string_pretty(&doc).expect("table serializes");
        s.push('\n');
        s
    }

    pub fn render(&self, format: Format) -> Result<String, CliError> {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => Ok(self.to_json()),
        }
    }

    /// Writes to `config.out` if set, otherwise to `stdout`.
    pub fn emit(&self, stdout: &mut dyn Write) -> Result<(), CliError> {
        let text = self.render(self.config.format)?;
        match &self.config.out {
            Some(path) => write_file(path, &text),
            None => stdout
                .write_all(text.as_bytes())
                .map_err(|e| CliError::Io("stdout".into(), e)),
        }
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::Io(path.display().to_string(), e))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> Table {
        let mut t = Table::new("sweep jitter", &RunConfig::default(), "lambda = 1", &["x", "name", "n"]);
        t.push(vec![0.1.into(), "a,b".into(), 3usize.into()]);
        t.push(vec![f64::NAN.into(), Cell::Empty, 0usize.into()]);
        t.meta("threshold", Some(0.25));
        t
    }

    #[test]
    fn floats_round_trip_with_seventeen_digits() {
        for x in [0.1, 1.0 / 3.0, -2.5e-300, 1e300, 0.0] {
            let s = format_float(x);
            assert_eq!(s.parse::<f64>().unwrap(), x);
            let mantissa = s.trim_start_matches('-').split('e').next().unwrap();
            assert_eq!(mantissa.replace('.', "").len(), 17);
        }
    }

    #[test]
    fn csv_has_header_block_and_lf_endings() {
        let csv = sample().to_csv().unwrap();
        assert!(!csv.contains('\r'));
        let lines: Vec<&str> = csv.lines().collect();
        assert!(lines[0].starts_with("# tool: bimodal-cli"));
        assert!(lines[2].starts_with("# config: {"));
        assert_eq!(lines[5], "# threshold: 2.5000000000000000e-1");
        assert_eq!(lines[6], "x,name,n");
        assert_eq!(lines[7], "1.0000000000000001e-1,\"a,b\",3");
        assert_eq!(lines[8], "NaN,,0");
    }

    #[test]
    fn json_mirrors_columns() {
        let v: Value = serde_json::from_str(&sample().to_json()).unwrap();
        assert_eq!(v["columns"], json!(["x", "name", "n"]));
        assert_eq!(v["rows"][0]["name"], json!("a,b"));
        assert_eq!(v["rows"][1]["x"], Value::Null);
        assert_eq!(v["header"]["seed"], json!(1));
        assert_eq!(v["header"]["config"]["reps"], json!(3000));
    }

    #[test]
    #[should_panic(expected = "row width")]
    fn ragged_rows_are_rejected() {
        sample().push(vec![1.0.into()]);
    }
}
