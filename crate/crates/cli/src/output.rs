//! Self-describing CSV and JSON tables.

use serde_json::{json, Map, Value};

pub const FORMAT_VERSION: u32 = 1;
pub const BUILD_ID: &str = env!("IOB_BUILD_ID");

#[derive(Debug, Clone, Copy, PartialEq, Eq, clap::ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Num(f64),
    Int(u64),
    Text(String),
    Bool(bool),
    /// Written as `none` in CSV and `null` in JSON.
    Missing,
}

impl From<f64> for Cell {
    fn from(x: f64) -> Self {
        if x.is_finite() {
            Cell::Num(x)
        } else {
            Cell::Missing
        }
    }
}

impl From<Option<f64>> for Cell {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Cell::Missing, Cell::from)
    }
}

impl From<bool> for Cell {
    fn from(b: bool) -> Self {
        Cell::Bool(b)
    }
}

impl From<&str> for Cell {
    fn from(s: &str) -> Self {
        Cell::Text(s.to_string())
    }
}

impl From<usize> for Cell {
    fn from(n: usize) -> Self {
        Cell::Int(n as u64)
    }
}

/// Shortest representation that parses back to the same `f64`.
pub fn format_float(x: f64) -> String {
    let a = x.abs();
    if a == 0.0 || (1e-5..1e16).contains(&a) {
        format!("{x}")
    } else {
        format!("{x:e}")
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Num(x) => format_float(*x),
            Cell::Int(n) => n.to_string(),
            Cell::Text(s) => s.clone(),
            Cell::Bool(b) => b.to_string(),
            Cell::Missing => "none".to_string(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Num(x) => json!(x),
            Cell::Int(n) => json!(n),
            Cell::Text(s) => json!(s),
            Cell::Bool(b) => json!(b),
            Cell::Missing => Value::Null,
        }
    }
}

/// Metadata value: a cell or a list of cells.
#[derive(Debug, Clone, PartialEq)]
pub enum MetaValue {
    One(Cell),
    Many(Vec<Cell>),
}

impl<T: Into<Cell>> From<T> for MetaValue {
    fn from(x: T) -> Self {
        MetaValue::One(x.into())
    }
}

impl MetaValue {
    pub fn list<T: Into<Cell>>(xs: impl IntoIterator<Item = T>) -> Self {
        MetaValue::Many(xs.into_iter().map(Into::into).collect())
    }

    fn csv(&self) -> String {
        match self {
            MetaValue::One(c) => c.csv(),
            MetaValue::Many(cs) => cs.iter().map(Cell::csv).collect::<Vec<_>>().join(" "),
        }
    }

    fn json(&self) -> Value {
        match self {
            MetaValue::One(c) => c.json(),
            MetaValue::Many(cs) => Value::Array(cs.iter().map(Cell::json).collect()),
        }
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    meta: Vec<(String, MetaValue)>,
    columns: Vec<(String, Vec<Cell>)>,
}

impl Table {
    pub fn new(command: &str) -> Self {
        let mut t = Table::default();
        t.meta("format_version", MetaValue::One(Cell::Int(FORMAT_VERSION as u64)));
        t.meta("generator", MetaValue::One(Cell::Text(format!("iob {}", env!("CARGO_PKG_VERSION")))));
        t.meta("build", BUILD_ID);
        t.meta("command", command);
        t
    }

    pub fn meta(&mut self, key: &str, value: impl Into<MetaValue>) -> &mut Self {
        self.meta.push((key.to_string(), value.into()));
        self
    }

    pub fn columns(&mut self, names: &[&str]) -> &mut Self {
        self.columns = names.iter().map(|n| (n.to_string(), Vec::new())).collect();
        self
    }

    pub fn row(&mut self, cells: Vec<Cell>) {
        assert_eq!(cells.len(), self.columns.len(), "row width");
        for (col, cell) in self.columns.iter_mut().zip(cells) {
            col.1.push(cell);
        }
    }

    pub fn len(&self) -> usize {
        self.columns.first().map_or(0, |c| c.1.len())
    }

    pub fn render(&self, format: Format) -> String {
        match format {
            Format::Csv => self.to_csv(),
            Format::Json => self.to_json(),
        }
    }

    fn to_csv(&self) -> String {
        let mut out = String::new();
        for (k, v) in &self.meta {
            out.push_str(&format!("# {k}: {}\n", v.csv()));
        }
        let names: Vec<&str> = self.columns.iter().map(|c| c.0.as_str()).collect();
        out.push_str(&names.join(","));
        out.push('\n');
        for i in 0..self.len() {
            let row: Vec<String> = self.columns.iter().map(|c| c.1[i].csv()).collect();
            out.push_str(&row.join(","));
            out.push('\n');
        }
        out
    }

    fn to_json(&self) -> String {
        let meta: Map<String, Value> = self.meta.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let data: Map<String, Value> = self
            .columns
            .iter()
            .map(|(k, cells)| (k.clone(), Value::Array(cells.iter().map(Cell::json).collect())))
            .collect();
        let mut s = serde_json::to_string_pretty(&json!({ "meta": meta, "data": data })).expect("table serializes");
        s.push('\n');
        s
    }
}
