//! Tables rendered as CSV or as a JSON envelope.

use serde::Serialize;
use serde_json::{json, Map, Value};

use super::config::RunConfig;

#[derive(Clone, Debug, PartialEq)]
pub enum Cell {
    Float(f64),
    Int(i64),
    Bool(bool),
    Text(String),
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

impl From<bool> for Cell {
    fn from(v: bool) -> Self {
        Cell::Bool(v)
    }
}

impl From<&str> for Cell {
    fn from(v: &str) -> Self {
        Cell::Text(v.to_string())
    }
}

impl From<Option<f64>> for Cell {
    fn from(v: Option<f64>) -> Self {
        match v {
            Some(x) => Cell::Float(x),
            None => Cell::Text("none".into()),
        }
    }
}

/// Twelve significant digits.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.11e}")
    } else {
        format!("{v}")
    }
}

fn rounded(v: f64) -> Value {
    if v.is_finite() {
        let r: f64 = format_float(v).parse().expect("formatted float parses");
        json!(r)
    } else {
        Value::String(format!("{v}"))
    }
}

impl Cell {
    fn csv(&self) -> String {
        match self {
            Cell::Float(v) => format_float(*v),
            Cell::Int(v) => v.to_string(),
            Cell::Bool(v) => v.to_string(),
            Cell::Text(v) => v.clone(),
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Float(v) => rounded(*v),
            Cell::Int(v) => json!(v),
            Cell::Bool(v) => json!(v),
            Cell::Text(v) => json!(v),
        }
    }
}

/// Columns and rows plus a trailing summary.
#[derive(Clone, Debug, Default)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<Cell>>,
    pub summary: Vec<(String, Cell)>,
}

impl Table {
    pub fn new(columns: &[&str]) -> Self {
        Self {
            columns: columns.iter().map(|c| c.to_string()).collect(),
            ..Self::default()
        }
    }

    pub fn push(&mut self, row: Vec<Cell>) {
        debug_assert_eq!(row.len(), self.columns.len());
        self.rows.push(row);
    }

    pub fn note(&mut self, key: &str, value: impl Into<Cell>) {
        self.summary.push((key.to_string(), value.into()));
    }

    /// Header line, one line per row, and the summary as a `#` comment line.
    pub fn to_csv(&self) -> String {
        let mut out = self.columns.join(",");
        out.push('\n');
        for row in &self.rows {
            let line: Vec<String> = row.iter().map(Cell::csv).collect();
            out.push_str(&line.join(","));
            out.push('\n');
        }
        if !self.summary.is_empty() {
            let parts: Vec<String> = self
                .summary
                .iter()
                .map(|(k, v)| format!("{k}={}", v.csv()))
                .collect();
            out.push_str("# ");
            out.push_str(&parts.join(" "));
            out.push('\n');
        }
        out
    }

    pub fn to_json(&self, command: &str, config: &RunConfig) -> String {
        let rows: Vec<Value> = self
            .rows
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
            .collect();
        let summary: Map<String, Value> = self.summary.iter().map(|(k, v)| (k.clone(), v.json())).collect();
        let envelope = json!({
            "tool": env!("CARGO_PKG_NAME"),
            "version": env!("CARGO_PKG_VERSION"),
            "command": command,
            "config": config_value(config),
            "columns": self.columns,
            "rows": rows,
            "summary": summary,
        });
        let mut text = serde_json::to_string_pretty(&envelope).expect("JSON values serialize");
        text.push('\n');
        text
    }
}

fn config_value(config: &impl Serialize) -> Value {
    serde_json::to_value(config).expect("config serializes")
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_have_twelve_significant_digits() {
        assert_eq!(format_float(0.1), "1.00000000000e-1");
        assert_eq!(format_float(-2.0 / 3.0), "-6.66666666667e-1");
        assert_eq!(rounded(2.0 / 3.0), json!(0.666666666667));
    }

    #[test]
    fn csv_layout() {
        let mut t = Table::new(&["w", "value"]);
        t.push(vec![Cell::from(1.0), Cell::from(-0.5)]);
        t.note("detected", true);
        assert_eq!(
            t.to_csv(),
            "w,value\n1.00000000000e0,-5.00000000000e-1\n# detected=true\n"
        );
    }
}
