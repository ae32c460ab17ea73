pub mod causal;
pub mod confidence;
pub mod equivalence;
pub mod fit;
pub mod gen;
pub mod quantum;

use std::path::{Path, PathBuf};

use nalgebra::{DMatrix, DVector};
use serde_json::Value;

/// `data/run.csv` → `data/run.truth.json`.
pub fn sidecar_path(csv: &Path) -> PathBuf {
    let stem = csv.file_stem().map(|s| s.to_string_lossy().into_owned()).unwrap_or_default();
    csv.with_file_name(format!("{stem}.truth.json"))
}

fn matrix_value(m: &DMatrix<f64>) -> Value {
    Value::Array(m.row_iter().map(|row| vector_value(row.iter())).collect())
}

fn vector_value<'a>(v: impl IntoIterator<Item = &'a f64>) -> Value {
    Value::Array(
        v.into_iter()
            .map(|x| serde_json::Number::from_f64(*x).map_or(Value::Null, Value::Number))
            .collect(),
    )
}

fn labels(prefix: &str, count: usize) -> Vec<String> {
    (1..=count).map(|i| format!("{prefix}{i}")).collect()
}

fn dvector_value(v: &DVector<f64>) -> Value {
    vector_value(v.iter())
}
