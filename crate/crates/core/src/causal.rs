//! Conditioning versus intervention on a discrete confounder template.
//!
//! Three blocks `B → C`, `(B, C) → R` with joint
//! `f(r, c, b) = f(r | c, b) f(c | b) f(b)`. Conditioning on `C` averages the
//! outcome mechanism over `f(b | c)`; intervening on `C` cuts the `B → C`
//! arrow and averages over the marginal `f(b)`.
//!
//! Tables are indexed `[c][b]` for `f(c | b)` and `[r][c][b]` for
//! `f(r | c, b)`, matching the JSON document layout.

use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DiscreteCausalModel {
    f_b: Vec<f64>,
    f_c_given_b: Vec<Vec<f64>>,
    f_r_given_cb: Vec<Vec<Vec<f64>>>,
}

fn check_entries(values: &[f64], slice: &str) -> Result<()> {
    if let Some(v) = values.iter().find(|v| !(0.0..=1.0).contains(*v)) {
        return Err(Error::InvalidCausalModel(format!("{slice}: entry {v} is outside [0, 1]")));
    }
    let sum: f64 = values.iter().sum();
    if (sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidCausalModel(format!("{slice}: sums to {sum}, not 1")));
    }
    Ok(())
}

impl DiscreteCausalModel {
    pub fn new(f_b: Vec<f64>, f_c_given_b: Vec<Vec<f64>>, f_r_given_cb: Vec<Vec<Vec<f64>>>) -> Result<Self> {
        let model = Self {
            f_b,
            f_c_given_b,
            f_r_given_cb,
        };
        model.validate()?;
        Ok(model)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let model: Self = serde_json::from_str(text)
            .map_err(|e| Error::InvalidCausalModel(format!("malformed JSON: {e}")))?;
        model.validate()?;
        Ok(model)
    }

    pub fn load(path: impl AsRef<Path>) -> Result<Self> {
        let path = path.as_ref();
        let text = std::fs::read_to_string(path).map_err(|source| Error::Io {
            path: path.to_path_buf(),
            source,
        })?;
        Self::from_json(&text)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("plain numeric tables serialize")
    }

    fn validate(&self) -> Result<()> {
        let b_card = self.f_b.len();
        let c_card = self.f_c_given_b.len();
        let r_card = self.f_r_given_cb.len();
        if b_card == 0 || c_card == 0 || r_card == 0 {
            return Err(Error::InvalidCausalModel("every block needs at least one state".into()));
        }
        check_entries(&self.f_b, "f_b")?;
        for (c, row) in self.f_c_given_b.iter().enumerate() {
            if row.len() != b_card {
                return Err(Error::InvalidCausalModel(format!(
                    "f_c_given_b[{c}]: has {} entries, expected {b_card}",
                    row.len()
                )));
            }
        }
        for (r, slab) in self.f_r_given_cb.iter().enumerate() {
            if slab.len() != c_card {
                return Err(Error::InvalidCausalModel(format!(
                    "f_r_given_cb[{r}]: has {} rows, expected {c_card}",
                    slab.len()
                )));
            }
            for (c, row) in slab.iter().enumerate() {
                if row.len() != b_card {
                    return Err(Error::InvalidCausalModel(format!(
                        "f_r_given_cb[{r}][{c}]: has {} entries, expected {b_card}",
                        row.len()
                    )));
                }
            }
        }
        for b in 0..b_card {
            let column: Vec<f64> = self.f_c_given_b.iter().map(|row| row[b]).collect();
            check_entries(&column, &format!("f_c_given_b[*][{b}]"))?;
        }
        for c in 0..c_card {
            for b in 0..b_card {
                let column: Vec<f64> = self.f_r_given_cb.iter().map(|slab| slab[c][b]).collect();
                check_entries(&column, &format!("f_r_given_cb[*][{c}][{b}]"))?;
            }
        }
        Ok(())
    }

    pub fn b_card(&self) -> usize {
        self.f_b.len()
    }

    pub fn c_card(&self) -> usize {
        self.f_c_given_b.len()
    }

    pub fn r_card(&self) -> usize {
        self.f_r_given_cb.len()
    }

    pub fn f_b(&self, b: usize) -> f64 {
        self.f_b[b]
    }

    pub fn f_c_given_b(&self, c: usize, b: usize) -> f64 {
        self.f_c_given_b[c][b]
    }

    pub fn f_r_given_cb(&self, r: usize, c: usize, b: usize) -> f64 {
        self.f_r_given_cb[r][c][b]
    }

    /// Marginal `f(c) = Σ_b f(c | b) f(b)`.
    pub fn f_c(&self, c: usize) -> f64 {
        (0..self.b_card()).map(|b| self.f_c_given_b[c][b] * self.f_b[b]).sum()
    }

    /// Bayes inversion `f(b | c) = f(c | b) f(b) / f(c)`; `None` when
    /// `f(c) = 0`.
    pub fn f_b_given_c(&self, c: usize) -> Option<Vec<f64>> {
        let fc = self.f_c(c);
        (fc > 0.0).then(|| {
            (0..self.b_card())
                .map(|b| self.f_c_given_b[c][b] * self.f_b[b] / fc)
                .collect()
        })
    }
}

/// `f(r, c, b)` indexed `[r][c][b]`.
#[derive(Debug, Clone, PartialEq)]
pub struct JointTable {
    pub values: Vec<Vec<Vec<f64>>>,
}

impl JointTable {
    pub fn total(&self) -> f64 {
        self.values.iter().flatten().flatten().sum()
    }
}

pub fn joint(model: &DiscreteCausalModel) -> JointTable {
    let values = (0..model.r_card())
        .map(|r| {
            (0..model.c_card())
                .map(|c| {
                    (0..model.b_card())
                        .map(|b| model.f_r_given_cb(r, c, b) * model.f_c_given_b(c, b) * model.f_b(b))
                        .collect()
                })
                .collect()
        })
        .collect();
    JointTable { values }
}

/// Distributions of `R` per value of `C`; a column is `None` where it is
/// undefined (conditioning on a zero-probability `c`).
#[derive(Debug, Clone, PartialEq)]
pub struct OutcomeTable {
    pub r_card: usize,
    pub columns: Vec<Option<Vec<f64>>>,
}

impl OutcomeTable {
    pub fn get(&self, r: usize, c: usize) -> Option<f64> {
        self.columns[c].as_ref().map(|col| col[r])
    }

    pub fn column(&self, c: usize) -> Result<&[f64]> {
        self.columns[c].as_deref().ok_or(Error::UndefinedConditional(c))
    }
}

/// `f(r | c) = Σ_b f(r | c, b) f(b | c)`.
pub fn conditional_r_given_c(model: &DiscreteCausalModel) -> OutcomeTable {
    let columns = (0..model.c_card())
        .map(|c| {
            model.f_b_given_c(c).map(|weights| {
                (0..model.r_card())
                    .map(|r| {
                        weights
                            .iter()
                            .enumerate()
                            .map(|(b, w)| model.f_r_given_cb(r, c, b) * w)
                            .sum()
                    })
                    .collect()
            })
        })
        .collect();
    OutcomeTable {
        r_card: model.r_card(),
        columns,
    }
}

/// `f(r ‖ c) = Σ_b f(r | c, b) f(b)`.
pub fn intervention_r_given_c(model: &DiscreteCausalModel) -> OutcomeTable {
    let columns = (0..model.c_card())
        .map(|c| {
            Some(
                (0..model.r_card())
                    .map(|r| (0..model.b_card()).map(|b| model.f_r_given_cb(r, c, b) * model.f_b(b)).sum())
                    .collect(),
            )
        })
        .collect();
    OutcomeTable {
        r_card: model.r_card(),
        columns,
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Divergence {
    /// Total variation between conditioning and intervention, per `c`.
    pub per_c: Vec<f64>,
    pub max: f64,
}

pub fn divergence(model: &DiscreteCausalModel) -> Result<Divergence> {
    let cond = conditional_r_given_c(model);
    let intv = intervention_r_given_c(model);
    let per_c = (0..model.c_card())
        .map(|c| {
            let a = cond.column(c)?;
            let b = intv.column(c)?;
            Ok(0.5 * a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>())
        })
        .collect::<Result<Vec<f64>>>()?;
    let max = per_c.iter().copied().fold(0.0, f64::max);
    Ok(Divergence { per_c, max })
}
