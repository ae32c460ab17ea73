use std::path::Path;

use anyhow::{bail, Context};
use nalgebra::DVector;
use serde::Deserialize;

use modelkit::data_model::{data_scale, load_csv, ols_fit, Dataset};
use modelkit::pls_sample::{bilinear_check, cross_validate, default_folds, pls_fit, CrossValidation};
use modelkit::rng::derive_seed;

use super::{labels, sidecar_path};
use crate::report::{Relation, Report, Table};
use crate::{usage, FitMethod, RunResult};

/// Tolerance on the reconstruction `X = TPᵀ + E`, `y = Tq + f`, relative to
/// the data scale.
const BILINEAR_TOL: f64 = 1e-8;

#[derive(Debug, Deserialize)]
struct Truth {
    beta: Vec<f64>,
}

pub fn run(data: &Path, method: FitMethod, m: Option<usize>, cv_folds: Option<usize>, seed: u64) -> RunResult<Report> {
    let d = load_csv(data)?;
    let mut report = Report::new("fit", Some(seed));
    report
        .param("data", data.display().to_string())
        .param("method", match method {
            FitMethod::Pls => "pls",
            FitMethod::Ols => "ols",
        })
        .param("m", m)
        .param("cv_folds", cv_folds)
        .count("n", d.n())
        .count("p", d.p());

    let (beta, intercept) = match method {
        FitMethod::Ols => {
            if m.is_some() || cv_folds.is_some() {
                return Err(usage("--m and --cv-folds apply to --method pls only"));
            }
            let fit = ols_fit(&d)?;
            report.scalar("rcond", fit.rcond);
            (fit.beta, fit.intercept)
        }
        FitMethod::Pls => {
            let m = match m {
                Some(m) => {
                    if cv_folds.is_some() {
                        return Err(usage("--cv-folds is only used when --m is omitted"));
                    }
                    m
                }
                None => {
                    let cv = cross_validation(&d, cv_folds, seed)?;
                    let mut press = Table::new(["press"]);
                    for (i, v) in cv.press.iter().enumerate() {
                        press.row(format!("m={}", i + 1), [*v]);
                    }
                    report.table("press", press).count("cv_folds", cv.folds);
                    cv.m_star
                }
            };
            let fit = pls_fit(&d, m)?;
            let scale = data_scale(d.x()).max(d.y().amax()).max(1.0);
            report
                .count("m", fit.m)
                .check("bilinear_identity", bilinear_check(&fit, &d)?.max(), Relation::AtMost, BILINEAR_TOL * scale);
            let intercept = fit.intercept();
            (fit.implied_beta, intercept)
        }
    };

    let truth = read_truth(data, d.p())?;
    let mut columns = vec!["estimate"];
    if truth.is_some() {
        columns.push("truth");
    }
    let mut coefficients = Table::new(columns);
    for (j, label) in labels("x", d.p()).into_iter().enumerate() {
        match &truth {
            Some(t) => coefficients.row(label, [beta[j], t[j]]),
            None => coefficients.row(label, [beta[j]]),
        }
    }
    report.table("coefficients", coefficients).scalar("intercept", intercept);
    if let Some(t) = truth {
        report.scalar("relative_error", (&beta - &t).norm() / t.norm());
    }
    Ok(report)
}

fn cross_validation(d: &Dataset, cv_folds: Option<usize>, seed: u64) -> RunResult<CrossValidation> {
    let n = d.n();
    let folds = cv_folds.unwrap_or_else(|| default_folds(n));
    if folds < 2 || folds > n {
        return Err(usage(format!("--cv-folds must satisfy 2 ≤ folds ≤ n = {n}")));
    }
    let m_max = (n - n.div_ceil(folds)).saturating_sub(1).min(d.p());
    if m_max == 0 {
        return Err(usage(format!("{n} rows are too few for {folds}-fold cross-validation")));
    }
    Ok(cross_validate(d, m_max, folds, derive_seed(seed, "fit"))?)
}

fn read_truth(data: &Path, p: usize) -> anyhow::Result<Option<DVector<f64>>> {
    let path = sidecar_path(data);
    if !path.exists() {
        return Ok(None);
    }
    let text = std::fs::read_to_string(&path).with_context(|| format!("cannot read {}", path.display()))?;
    let truth: Truth = serde_json::from_str(&text).with_context(|| format!("malformed sidecar {}", path.display()))?;
    if truth.beta.len() != p {
        bail!("sidecar {} has {} coefficients, data has {p} predictors", path.display(), truth.beta.len());
    }
    Ok(Some(DVector::from_vec(truth.beta)))
}
