use nalgebra::DVector;

use modelkit::confidence::{uniformity_check, NormalMeanScenario, RegressionScenario};
use modelkit::rng::derive_seed;

use crate::report::{Relation, Report};
use crate::{usage, RunResult};

/// Largest acceptable KS distance to Uniform(0, 1).
pub const KS_LIMIT: f64 = 0.04;

pub fn normal_scenario(sigma_factor: f64) -> NormalMeanScenario {
    NormalMeanScenario {
        eta: 1.0,
        sigma: sigma_factor,
        n: 10,
        assumed_sigma: 1.0,
    }
}

pub fn regression_scenario() -> RegressionScenario {
    RegressionScenario {
        beta: DVector::from_column_slice(&[1.0, -0.5]),
        intercept: 0.5,
        noise_sd: 1.0,
        n: 12,
        coef_index: 0,
    }
}

/// The normal-mean curve assumes unit noise while the data use
/// `sigma_factor`; the t-pivot estimates its own scale and is unaffected.
pub fn run(reps: usize, seed: u64, sigma_factor: f64) -> RunResult<Report> {
    if reps < 100 {
        return Err(usage("--reps must be at least 100"));
    }
    if !(sigma_factor > 0.0 && sigma_factor.is_finite()) {
        return Err(usage("--sigma-factor must be positive"));
    }
    let base = derive_seed(seed, "confidence");
    let normal = normal_scenario(sigma_factor);
    let regression = regression_scenario();
    let ks_normal = uniformity_check(reps, derive_seed(base, "normal_mean"), |rng| normal.pit(rng))?;
    let ks_regression = uniformity_check(reps, derive_seed(base, "regression"), |rng| regression.pit(rng))?;
    let mut report = Report::new("confidence", Some(seed));
    report
        .param("reps", reps)
        .param("sigma_factor", sigma_factor)
        .scalar("ks_normal_mean", ks_normal)
        .scalar("ks_regression", ks_regression)
        .check("ks_normal_mean", ks_normal, Relation::Below, KS_LIMIT)
        .check("ks_regression", ks_regression, Relation::Below, KS_LIMIT);
    Ok(report)
}
