//! Machine-readable run reports.
//!
//! A report is one JSON object with sorted keys. Floats are written with 17
//! significant digits so they read back bit-for-bit, and non-finite values
//! become `null`.

use std::fmt::Write as _;

use serde_json::{Map, Value};

pub const SCHEMA: &str = "modelkit/1";

#[derive(Debug, Clone, PartialEq)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<(String, Vec<Option<f64>>)>,
}

impl Table {
    pub fn new<S: Into<String>>(columns: impl IntoIterator<Item = S>) -> Self {
        Self {
            columns: columns.into_iter().map(Into::into).collect(),
            rows: Vec::new(),
        }
    }

    pub fn row(&mut self, label: impl Into<String>, values: impl IntoIterator<Item = f64>) {
        self.row_opt(label, values.into_iter().map(Some));
    }

    /// Row with missing entries, written as `null`.
    pub fn row_opt(&mut self, label: impl Into<String>, values: impl IntoIterator<Item = Option<f64>>) {
        let values: Vec<Option<f64>> = values.into_iter().collect();
        debug_assert_eq!(values.len(), self.columns.len());
        self.rows.push((label.into(), values));
    }

    fn to_value(&self) -> Value {
        let rows = self
            .rows
            .iter()
            .map(|(label, values)| {
                let mut row = Map::new();
                row.insert("label".into(), Value::from(label.as_str()));
                row.insert("values".into(), Value::Array(values.iter().map(|v| float(v.unwrap_or(f64::NAN))).collect()));
                Value::Object(row)
            })
            .collect();
        let mut table = Map::new();
        table.insert("columns".into(), Value::from(self.columns.clone()));
        table.insert("rows".into(), Value::Array(rows));
        Value::Object(table)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Diagnostic {
    pub name: String,
    pub value: f64,
    pub threshold: f64,
    /// Comparison that must hold between `value` and `threshold`.
    pub relation: Relation,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Relation {
    Below,
    AtMost,
    AtLeast,
}

impl Relation {
    fn symbol(self) -> &'static str {
        match self {
            Relation::Below => "<",
            Relation::AtMost => "<=",
            Relation::AtLeast => ">=",
        }
    }
}

impl Diagnostic {
    pub fn passed(&self) -> bool {
        match self.relation {
            Relation::Below => self.value < self.threshold,
            Relation::AtMost => self.value <= self.threshold,
            Relation::AtLeast => self.value >= self.threshold,
        }
    }

    pub fn describe(&self) -> String {
        format!(
            "{}: {:e} (required {} {:e})",
            self.name,
            self.value,
            self.relation.symbol(),
            self.threshold
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    command: String,
    seed: Option<u64>,
    parameters: Map<String, Value>,
    scalars: Map<String, Value>,
    tables: Vec<(String, Table)>,
    diagnostics: Vec<Diagnostic>,
}

impl Report {
    pub fn new(command: &str, seed: Option<u64>) -> Self {
        Self {
            command: command.to_string(),
            seed,
            parameters: Map::new(),
            scalars: Map::new(),
            tables: Vec::new(),
            diagnostics: Vec::new(),
        }
    }

    pub fn param(&mut self, name: &str, value: impl Into<Value>) -> &mut Self {
        self.parameters.insert(name.into(), value.into());
        self
    }

    pub fn scalar(&mut self, name: &str, value: f64) -> &mut Self {
        self.scalars.insert(name.into(), float(value));
        self
    }

    pub fn count(&mut self, name: &str, value: usize) -> &mut Self {
        self.scalars.insert(name.into(), Value::from(value));
        self
    }

    pub fn table(&mut self, name: &str, table: Table) -> &mut Self {
        self.tables.push((name.into(), table));
        self
    }

    pub fn check(&mut self, name: &str, value: f64, relation: Relation, threshold: f64) -> &mut Self {
        self.diagnostics.push(Diagnostic {
            name: name.into(),
            value,
            threshold,
            relation,
        });
        self
    }

    pub fn diagnostics(&self) -> &[Diagnostic] {
        &self.diagnostics
    }

    pub fn first_failure(&self) -> Option<&Diagnostic> {
        self.diagnostics.iter().find(|d| !d.passed())
    }

    pub fn passed(&self) -> bool {
        self.first_failure().is_none()
    }

    pub fn to_value(&self) -> Value {
        let mut command = Map::new();
        command.insert("name".into(), Value::from(self.command.as_str()));
        command.insert("parameters".into(), Value::Object(self.parameters.clone()));
        command.insert("seed".into(), self.seed.map_or(Value::Null, Value::from));

        let tables = self.tables.iter().map(|(name, t)| (name.clone(), t.to_value())).collect();
        let diagnostics = self
            .diagnostics
            .iter()
            .map(|d| {
                let mut m = Map::new();
                m.insert("name".into(), Value::from(d.name.as_str()));
                m.insert("value".into(), float(d.value));
                m.insert("threshold".into(), float(d.threshold));
                m.insert("relation".into(), Value::from(d.relation.symbol()));
                m.insert("pass".into(), Value::Bool(d.passed()));
                Value::Object(m)
            })
            .collect();

        let mut root = Map::new();
        root.insert("schema".into(), Value::from(SCHEMA));
        root.insert("command".into(), Value::Object(command));
        root.insert("scalars".into(), Value::Object(self.scalars.clone()));
        root.insert("tables".into(), Value::Object(tables));
        root.insert("diagnostics".into(), Value::Array(diagnostics));
        root.insert("passed".into(), Value::Bool(self.passed()));
        Value::Object(root)
    }

    pub fn render(&self) -> String {
        render(&self.to_value())
    }
}

fn float(v: f64) -> Value {
    // `+ 0.0` folds -0 into 0.
    serde_json::Number::from_f64(v + 0.0).map_or(Value::Null, Value::Number)
}

/// Pretty-prints with two-space indentation; object keys come out sorted
/// because `serde_json::Map` is ordered.
pub fn render(value: &Value) -> String {
    let mut out = String::new();
    write_value(&mut out, value, 0);
    out.push('\n');
    out
}

fn write_value(out: &mut String, value: &Value, depth: usize) {
    match value {
        Value::Null | Value::Bool(_) | Value::String(_) => out.push_str(&value.to_string()),
        Value::Number(n) => match (n.as_u64(), n.as_i64()) {
            (Some(u), _) => write!(out, "{u}").unwrap(),
            (None, Some(i)) => write!(out, "{i}").unwrap(),
            _ => write!(out, "{}", format_float(n.as_f64().unwrap_or(f64::NAN))).unwrap(),
        },
        Value::Array(items) if items.iter().all(|v| !v.is_array() && !v.is_object()) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                if i > 0 {
                    out.push_str(", ");
                }
                write_value(out, item, depth + 1);
            }
            out.push(']');
        }
        Value::Array(items) => {
            out.push('[');
            for (i, item) in items.iter().enumerate() {
                out.push_str(if i > 0 { ",\n" } else { "\n" });
                indent(out, depth + 1);
                write_value(out, item, depth + 1);
            }
            out.push('\n');
            indent(out, depth);
            out.push(']');
        }
        Value::Object(map) if map.is_empty() => out.push_str("{}"),
        Value::Object(map) => {
            out.push('{');
            for (i, (key, item)) in map.iter().enumerate() {
                out.push_str(if i > 0 { ",\n" } else { "\n" });
                indent(out, depth + 1);
                out.push_str(&Value::from(key.as_str()).to_string());
                out.push_str(": ");
                write_value(out, item, depth + 1);
            }
            out.push('\n');
            indent(out, depth);
            out.push('}');
        }
    }
}

fn indent(out: &mut String, depth: usize) {
    for _ in 0..depth {
        out.push_str("  ");
    }
}

/// 17 significant digits in scientific notation.
pub fn format_float(v: f64) -> String {
    if v.is_finite() {
        format!("{v:.16e}")
    } else {
        "null".into()
    }
}
