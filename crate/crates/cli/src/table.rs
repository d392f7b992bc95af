//! Plot-ready tables with a metadata preamble, rendered as CSV or JSON lines.

use serde::Serialize;
use serde_json::json;
use sha2::{Digest, Sha256};

use crate::config::Format;

#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Int(u64),
    Float(f64),
    Bool(bool),
    Empty,
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Int(v) => v.to_string(),
            // Shortest round-trip form, with an exponent for extreme values.
            Cell::Float(v) => format!("{v:?}"),
            Cell::Bool(v) => v.to_string(),
            Cell::Empty => String::new(),
        }
    }

    fn json(&self) -> serde_json::Value {
        match self {
            Cell::Int(v) => json!(v),
            Cell::Float(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Empty => serde_json::Value::Null,
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
        Cell::Int(v as u64)
    }
}

impl From<u64> for Cell {
    fn from(v: u64) -> Self {
        Cell::Int(v)
    }
}

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl<T: Into<Cell>> From<Option<T>> for Cell {
    fn from(v: Option<T>) -> Self {
        v.map(Into::into).unwrap_or(Cell::Empty)
    }
}

#[derive(Debug, Clone, Default)]
pub struct Table {
    pub columns: Vec<&'static str>,
    pub rows: Vec<Vec<Cell>>,
}

impl Table {
    pub fn new(columns: Vec<&'static str>) -> Self {
        Self {
            columns,
            rows: Vec::new(),
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }
}

/// Identifies a run: the command plus its fully resolved configuration.
#[derive(Debug, Clone)]
pub struct Metadata {
    pub command: &'static str,
    pub seed: u64,
    pub config: serde_json::Value,
}

impl Metadata {
    pub fn new(command: &'static str, seed: u64, config: &impl Serialize) -> Self {
        Self {
            command,
            seed,
            config: serde_json::to_value(config).expect("config serializes"),
        }
    }

    /// SHA-256 of the compact JSON form of the resolved configuration.
    pub fn config_hash(&self) -> String {
        hex::encode(Sha256::digest(self.config.to_string().as_bytes()))
    }
}

pub fn render(meta: &Metadata, table: &Table, format: Format) -> String {
    let mut out = String::new();
    match format {
        Format::Csv => {
            out.push_str(&format!(
                "# tool: bitdensity {}\n",
                env!("CARGO_PKG_VERSION")
            ));
            out.push_str(&format!("# command: {}\n", meta.command));
            out.push_str(&format!("# seed: {}\n", meta.seed));
            out.push_str(&format!("# config_sha256: {}\n", meta.config_hash()));
            out.push_str(&format!("# config: {}\n", meta.config));
            out.push_str(&table.columns.join(","));
            out.push('\n');
            for row in &table.rows {
                let cells: Vec<String> = row.iter().map(Cell::csv).collect();
                out.push_str(&cells.join(","));
                out.push('\n');
            }
        }
        Format::Jsonl => {
            let head = json!({
                "meta": {
                    "tool": format!("bitdensity {}", env!("CARGO_PKG_VERSION")),
                    "command": meta.command,
                    "seed": meta.seed,
                    "config_sha256": meta.config_hash(),
                    "config": meta.config,
                    "columns": table.columns,
                }
            });
            out.push_str(&head.to_string());
            out.push('\n');
            for row in &table.rows {
                // Assembled by hand to keep column order.
                let fields: Vec<String> = table
                    .columns
                    .iter()
                    .zip(row)
                    .map(|(k, v)| format!("{}:{}", json!(k), v.json()))
                    .collect();
                out.push('{');
                out.push_str(&fields.join(","));
                out.push_str("}\n");
            }
        }
    }
    out
}
