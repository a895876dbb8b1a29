use std::fmt;

use transport_core::ScalarField2D;

use crate::config::ExperimentKind;
use crate::error::{BenchError, Result};

#[derive(Debug, Clone, PartialEq)]
pub enum Value {
    Text(String),
    Int(usize),
    Real(f64),
    /// A cell with nothing to report, e.g. the order on the coarsest rung.
    Empty,
}

impl Value {
    pub fn as_real(&self) -> Option<f64> {
        match *self {
            Value::Real(x) => Some(x),
            Value::Int(n) => Some(n as f64),
            _ => None,
        }
    }

    pub fn as_text(&self) -> Option<&str> {
        match self {
            Value::Text(s) => Some(s),
            _ => None,
        }
    }
}

/// Reals are printed with 6 significant digits.
impl fmt::Display for Value {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Value::Text(s) => f.write_str(s),
            Value::Int(n) => write!(f, "{n}"),
            Value::Real(x) => write!(f, "{x:.5e}"),
            Value::Empty => Ok(()),
        }
    }
}

impl From<&str> for Value {
    fn from(s: &str) -> Self {
        Value::Text(s.to_string())
    }
}

impl From<String> for Value {
    fn from(s: String) -> Self {
        Value::Text(s)
    }
}

impl From<usize> for Value {
    fn from(n: usize) -> Self {
        Value::Int(n)
    }
}

impl From<f64> for Value {
    fn from(x: f64) -> Self {
        Value::Real(x)
    }
}

impl From<Option<f64>> for Value {
    fn from(x: Option<f64>) -> Self {
        x.map_or(Value::Empty, Value::Real)
    }
}

/// Ordered key/value cells of one table row.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ResultRow {
    cells: Vec<(String, Value)>,
}

impl ResultRow {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.cells.push((key.to_string(), value.into()));
        self
    }

    pub fn get(&self, key: &str) -> Option<&Value> {
        self.cells.iter().find(|(k, _)| k == key).map(|(_, v)| v)
    }

    pub fn real(&self, key: &str) -> Option<f64> {
        self.get(key).and_then(Value::as_real)
    }

    pub fn text(&self, key: &str) -> Option<&str> {
        self.get(key).and_then(Value::as_text)
    }

    pub fn keys(&self) -> impl Iterator<Item = &str> {
        self.cells.iter().map(|(k, _)| k.as_str())
    }

    pub fn values(&self) -> impl Iterator<Item = &Value> {
        self.cells.iter().map(|(_, v)| v)
    }
}

/// A finished experiment: its table, the fields worth keeping, and remarks.
#[derive(Debug, Clone)]
pub struct Experiment {
    pub name: String,
    pub kind: ExperimentKind,
    pub columns: Vec<String>,
    pub rows: Vec<ResultRow>,
    pub fields: Vec<(String, ScalarField2D)>,
    /// Flags such as runs stopped by the iteration cap.
    pub notes: Vec<String>,
}

impl Experiment {
    pub fn new(name: &str, kind: ExperimentKind, columns: &[&str]) -> Self {
        Experiment {
            name: name.to_string(),
            kind,
            columns: columns.iter().map(|c| c.to_string()).collect(),
            rows: Vec::new(),
            fields: Vec::new(),
            notes: Vec::new(),
        }
    }

    /// Rows must carry exactly the table's columns, in order, with finite reals.
    pub fn check(&self) -> Result<()> {
        for (k, row) in self.rows.iter().enumerate() {
            let keys: Vec<String> = row.keys().map(str::to_string).collect();
            let finite = row.values().all(|v| v.as_real().is_none_or(f64::is_finite));
            if keys != self.columns || !finite {
                return Err(BenchError::RowShape {
                    table: self.name.clone(),
                    row: k,
                    expected: self.columns.clone(),
                    got: keys,
                });
            }
        }
        Ok(())
    }

    /// Fixed-width text rendering for the terminal.
    pub fn render(&self) -> String {
        let cells: Vec<Vec<String>> = self
            .rows
            .iter()
            .map(|r| r.values().map(|v| v.to_string()).collect())
            .collect();
        let widths: Vec<usize> = (0..self.columns.len())
            .map(|c| {
                cells
                    .iter()
                    .map(|r| r[c].len())
                    .chain([self.columns[c].len()])
                    .max()
                    .unwrap_or(0)
            })
            .collect();
        let line = |row: &[String]| {
            row.iter()
                .zip(&widths)
                .map(|(s, w)| format!("{s:>w$}"))
                .collect::<Vec<_>>()
                .join("  ")
        };
        let mut out = line(&self.columns);
        for row in &cells {
            out.push('\n');
            out.push_str(&line(row));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn six_significant_digits() {
        assert_eq!(Value::Real(0.0164).to_string(), "1.64000e-2");
        assert_eq!(Value::Real(-123456.789).to_string(), "-1.23457e5");
        assert_eq!(Value::Int(40).to_string(), "40");
        assert_eq!(Value::from(None::<f64>).to_string(), "");
    }

    #[test]
    fn shape_check() {
        let mut e = Experiment::new("t", ExperimentKind::Convergence, &["a", "b"]);
        e.rows.push(ResultRow::new().with("a", 1.0).with("b", "x"));
        assert!(e.check().is_ok());
        e.rows.push(ResultRow::new().with("b", 1.0).with("a", 2.0));
        assert!(matches!(e.check(), Err(BenchError::RowShape { row: 1, .. })));
        e.rows.pop();
        e.rows.push(ResultRow::new().with("a", f64::NAN).with("b", 2.0));
        assert!(e.check().is_err());
    }

    #[test]
    fn render_aligns_columns() {
        let mut e = Experiment::new("t", ExperimentKind::Convergence, &["dx", "e_uT"]);
        e.rows.push(ResultRow::new().with("dx", 0.5).with("e_uT", 0.25));
        let text = e.render();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), 2);
        assert_eq!(lines[0].len(), lines[1].len());
    }
}
