//! Tabular output with fixed float formatting.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};
use serde_json::{Map, Value};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

impl Format {
    fn extension(self) -> &'static str {
        match self {
            Format::Csv => "csv",
            Format::Json => "json",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(usize),
    Num(f64),
    Text(String),
    Empty,
}

/// 15 significant digits, scientific notation.
pub fn format_float(x: f64) -> String {
    format!("{x:.14e}")
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(i) => i.to_string(),
            Cell::Num(x) => format_float(*x),
            Cell::Text(s) => s.clone(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Int(i) => Value::from(*i),
            // round through the CSV representation so both formats agree
            Cell::Num(x) => format_float(*x)
                .parse::<f64>()
                .ok()
                .and_then(serde_json::Number::from_f64)
                .map_or(Value::Null, Value::Number),
            Cell::Text(s) => Value::from(s.clone()),
            Cell::Empty => Value::Null,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub name: &'static str,
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(name: &'static str, columns: &[&'static str]) -> Self {
        Self {
            name,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            let _ = writeln!(out, "{}", line.join(","));
        }
        out
    }

    fn to_json_rows(&self) -> Value {
        Value::Array(
            self.rows
                .iter()
                .map(|row| {
                    let obj: Map<String, Value> = self
                        .columns
                        .iter()
                        .zip(row)
                        .map(|(c, v)| (c.clone(), v.json()))
                        .collect();
                    Value::Object(obj)
                })
                .collect(),
        )
    }
}

/// Everything a command produces: a primary table, optional companions, and
/// metadata for the JSON form.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub meta: Value,
    pub tables: Vec<Table>,
}

impl Report {
    pub fn to_json(&self) -> String {
        let mut doc = Map::new();
        doc.insert("meta".into(), self.meta.clone());
        for (i, t) in self.tables.iter().enumerate() {
            let key = if i == 0 { "rows" } else { t.name };
            doc.insert(key.into(), t.to_json_rows());
        }
        let mut s =
            serde_json::to_string_pretty(&Value::Object(doc)).expect("json values serialize");
        s.push('\n');
        s
    }

    /// Render to `(path, contents)` pairs. CSV companions go next to the main
    /// file as `<stem>.<table>.csv`; without a path everything goes to one
    /// stdout stream, tables separated by a blank line.
    pub fn render(&self, out: Option<&Path>, format: Format) -> Vec<(Option<PathBuf>, String)> {
        match format {
            Format::Json => vec![(out.map(Path::to_path_buf), self.to_json())],
            Format::Csv => match out {
                None => {
                    let body: Vec<String> = self.tables.iter().map(Table::to_csv).collect();
                    vec![(None, body.join("\n"))]
                }
                Some(path) => self
                    .tables
                    .iter()
                    .enumerate()
                    .map(|(i, t)| {
                        let p = if i == 0 {
                            path.to_path_buf()
                        } else {
                            companion_path(path, t.name, format)
                        };
                        (Some(p), t.to_csv())
                    })
                    .collect(),
            },
        }
    }

    pub fn write(&self, out: Option<&Path>, format: Format) -> std::io::Result<Vec<PathBuf>> {
        let mut written = Vec::new();
        for (path, body) in self.render(out, format) {
            match path {
                Some(p) => {
                    fs::write(&p, body)?;
                    written.push(p);
                }
                None => print!("{body}"),
            }
        }
        Ok(written)
    }
}

pub fn companion_path(path: &Path, name: &str, format: Format) -> PathBuf {
    let stem = path
        .file_stem()
        .map_or_else(|| "out".into(), |s| s.to_string_lossy().into_owned());
    path.with_file_name(format!("{stem}.{name}.{}", format.extension()))
}
