use nalgebra::DMatrix;

use super::{check_distinct, operator_from_values, CMatrix, Operator};
use crate::{Error, Result};

const SUM_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq)]
pub struct ConceptualVariable {
    pub name: String,
    values: Vec<f64>,
    pub accessible: bool,
}

impl ConceptualVariable {
    pub fn new(name: impl Into<String>, values: Vec<f64>, accessible: bool) -> Result<Self> {
        if values.is_empty() {
            return Err(Error::InvalidOperator("variable has no values".into()));
        }
        check_distinct(&values)?;
        Ok(Self {
            name: name.into(),
            values,
            accessible,
        })
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn operator(&self, basis: &CMatrix) -> Result<Operator> {
        operator_from_values(&self.values, basis)
    }

    /// Operator in the standard basis.
    pub fn diagonal_operator(&self) -> Result<Operator> {
        let d = self.values.len();
        self.operator(&DMatrix::identity(d, d))
    }
}

/// Accessible variable `ξ` with values `1, ..., r`; `ξ = k` is the choice of
/// prospect `k`.
pub fn decision_variable(r: usize) -> Result<ConceptualVariable> {
    if r < 1 {
        return Err(Error::out_of_range("r", r, "r ≥ 1"));
    }
    ConceptualVariable::new("decision", (1..=r).map(|k| k as f64).collect(), true)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Prospect {
    pub label: String,
    pub utility: f64,
    pub attraction: f64,
}

impl Prospect {
    pub fn new(label: impl Into<String>, utility: f64, attraction: f64) -> Self {
        Self {
            label: label.into(),
            utility,
            attraction,
        }
    }
}

/// `p = f + q` per prospect, after checking `Σf = 1`, `Σq = 0` and that each
/// `p` lies in `[0, 1]`.
pub fn qdt_probabilities(prospects: &[Prospect]) -> Result<Vec<f64>> {
    if prospects.is_empty() {
        return Err(Error::InvalidProspects("no prospects".into()));
    }
    for p in prospects {
        if !(0.0..=1.0).contains(&p.utility) {
            return Err(Error::InvalidProspects(format!(
                "utility factor of {} is {}, outside [0, 1]",
                p.label, p.utility
            )));
        }
        if !(-1.0..=1.0).contains(&p.attraction) {
            return Err(Error::InvalidProspects(format!(
                "attraction factor of {} is {}, outside [-1, 1]",
                p.label, p.attraction
            )));
        }
    }
    let f_sum: f64 = prospects.iter().map(|p| p.utility).sum();
    if (f_sum - 1.0).abs() > SUM_TOL {
        return Err(Error::InvalidProspects(format!("utility factors sum to {f_sum}")));
    }
    let q_sum: f64 = prospects.iter().map(|p| p.attraction).sum();
    if q_sum.abs() > SUM_TOL {
        return Err(Error::InvalidProspects(format!("attraction factors sum to {q_sum}")));
    }
    prospects
        .iter()
        .map(|p| {
            let probability = p.utility + p.attraction;
            if (-SUM_TOL..=1.0 + SUM_TOL).contains(&probability) {
                Ok(probability)
            } else {
                Err(Error::InconsistentAttraction {
                    label: p.label.clone(),
                    probability,
                })
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::is_maximal;
    use super::*;

    fn prospects(f: &[f64], q: &[f64]) -> Vec<Prospect> {
        f.iter()
            .zip(q)
            .enumerate()
            .map(|(i, (&f, &q))| Prospect::new(format!("pi{}", i + 1), f, q))
            .collect()
    }

    #[test]
    fn decision_variable_values() {
        assert_eq!(decision_variable(3).unwrap().values(), &[1.0, 2.0, 3.0]);
        assert_eq!(decision_variable(1).unwrap().values(), &[1.0]);
        assert!(decision_variable(0).is_err());
        let xi = decision_variable(4).unwrap();
        assert!(xi.accessible);
        assert!(is_maximal(&xi.diagonal_operator().unwrap()));
    }

    #[test]
    fn variable_rejects_repeated_values() {
        assert!(ConceptualVariable::new("theta", vec![1.0, 2.0, 1.0], true).is_err());
    }

    #[test]
    fn no_attraction_gives_utilities() {
        let f = [0.2, 0.5, 0.3];
        assert_eq!(qdt_probabilities(&prospects(&f, &[0.0; 3])).unwrap(), f);
    }

    #[test]
    fn attraction_shifts_probabilities() {
        let p = qdt_probabilities(&prospects(&[0.5, 0.5], &[0.25, -0.25])).unwrap();
        assert_eq!(p, vec![0.75, 0.25]);
    }

    #[test]
    fn inconsistent_attraction_names_prospect() {
        let err = qdt_probabilities(&prospects(&[0.9, 0.1], &[0.2, -0.2])).unwrap_err();
        let msg = err.to_string();
        assert!(msg.contains("inconsistent attraction factors") && msg.contains("pi1"), "{msg}");
    }

    #[test]
    fn set_constraints() {
        assert!(qdt_probabilities(&prospects(&[0.5, 0.4], &[0.0, 0.0])).is_err());
        assert!(qdt_probabilities(&prospects(&[0.5, 0.5], &[0.1, 0.0])).is_err());
        assert!(qdt_probabilities(&[]).is_err());
    }
}
