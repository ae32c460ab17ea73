//! Confidence curves and fiducial distributions for scalar parameters.
//!
//! A confidence curve `C(η; Y)` is a data-dependent CDF over the parameter
//! that, evaluated at the true value, is Uniform(0, 1) under the model. Its
//! inverse gives one-sided limits `η_α = C⁻¹(α)` with
//! `P(η ≤ η_α) = α`.

mod fiducial;
pub mod special;

pub use fiducial::{fiducial_distribution, FiducialModel, FiducialSample, LocationModel, ScaleModel};

use nalgebra::DVector;
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::data_model::{ols_fit, Dataset};
use crate::linalg::{standard_normal_matrix, symmetrize};
use crate::rng::{self, Rng};
use crate::{Error, Result};
use special::{normal_cdf, student_t_cdf};

/// Accuracy required of a quantile returned by [`invert`].
pub const INVERT_TOL: f64 = 1e-9;

const MAX_EXPANSIONS: usize = 60;

/// Standardized pivot behind a curve.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Pivot {
    /// `Φ((η − center) / scale)`
    Normal { center: f64, scale: f64 },
    /// `T_dof((η − center) / scale)`
    StudentT { center: f64, scale: f64, dof: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConfidenceCurve {
    pub pivot: Pivot,
    /// Initial bracket for quantile searches.
    pub support: (f64, f64),
    pub label: String,
}

impl ConfidenceCurve {
    fn new(pivot: Pivot, label: String) -> Self {
        let (center, scale) = match pivot {
            Pivot::Normal { center, scale } | Pivot::StudentT { center, scale, .. } => (center, scale),
        };
        Self {
            pivot,
            support: (center - 10.0 * scale, center + 10.0 * scale),
            label,
        }
    }

    pub fn evaluate(&self, eta: f64) -> f64 {
        match self.pivot {
            Pivot::Normal { center, scale } => normal_cdf((eta - center) / scale),
            Pivot::StudentT { center, scale, dof } => student_t_cdf((eta - center) / scale, dof),
        }
    }
}

/// `C(η) = Φ((η − ȳ)/(σ/√n))` for a normal sample with known `σ`.
pub fn normal_mean_confidence(data: &[f64], sigma: f64) -> Result<ConfidenceCurve> {
    if data.is_empty() {
        return Err(Error::out_of_range("n", 0, "≥ 1"));
    }
    if !(sigma > 0.0 && sigma.is_finite()) {
        return Err(Error::out_of_range("sigma", sigma, "> 0"));
    }
    let n = data.len() as f64;
    let mean = data.iter().sum::<f64>() / n;
    let scale = sigma / n.sqrt();
    Ok(ConfidenceCurve::new(
        Pivot::Normal { center: mean, scale },
        format!("normal mean, known sigma = {sigma}, n = {}", data.len()),
    ))
}

/// t-pivot for coefficient `coef_index` of the least-squares fit:
/// `C(η) = T_{n−p−1}((η − β̂ⱼ) / se(β̂ⱼ))`.
pub fn regression_coef_confidence(d: &Dataset, coef_index: usize) -> Result<ConfidenceCurve> {
    let (n, p) = (d.n(), d.p());
    if coef_index >= p {
        return Err(Error::out_of_range("coef_index", coef_index, format!("< {p}")));
    }
    if n <= p + 1 {
        return Err(Error::out_of_range("n", n, format!("> p + 1 = {}", p + 1)));
    }
    let fit = ols_fit(d)?;
    let (c, _) = d.center();
    let residual = c.y() - c.x() * &fit.beta;
    let rss = residual.dot(&residual);
    let ss_y = c.y().dot(c.y());
    if ss_y == 0.0 || rss <= 1e-20 * ss_y {
        return Err(Error::ZeroResidualVariance);
    }
    let dof = (n - p - 1) as f64;
    let s2 = rss / dof;
    let gram = symmetrize(&(c.x().transpose() * c.x()));
    let inv = gram
        .cholesky()
        .ok_or(Error::Collinear { rcond: fit.rcond })?
        .inverse();
    let se = (s2 * inv[(coef_index, coef_index)]).sqrt();
    Ok(ConfidenceCurve::new(
        Pivot::StudentT {
            center: fit.beta[coef_index],
            scale: se,
            dof,
        },
        format!("OLS coefficient {coef_index}, t pivot with {dof} degrees of freedom"),
    ))
}

/// `C⁻¹(alpha)` by bisection. The support hint is widened geometrically
/// until it brackets `alpha`.
pub fn invert(curve: &ConfidenceCurve, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(Error::out_of_range("alpha", alpha, "0 < alpha < 1"));
    }
    let (mut lo, mut hi) = curve.support;
    let mut width = (hi - lo).max(1e-300);
    let mut expansions = 0;
    while curve.evaluate(lo) > alpha || curve.evaluate(hi) < alpha {
        if expansions == MAX_EXPANSIONS {
            return Err(Error::NoBracket { alpha });
        }
        if curve.evaluate(lo) > alpha {
            lo -= width;
        }
        if curve.evaluate(hi) < alpha {
            hi += width;
        }
        width *= 2.0;
        expansions += 1;
    }
    for _ in 0..2000 {
        let mid = lo + 0.5 * (hi - lo);
        if mid <= lo || mid >= hi {
            break;
        }
        if curve.evaluate(mid) < alpha {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let eta = if alpha - curve.evaluate(lo) <= curve.evaluate(hi) - alpha { lo } else { hi };
    if (curve.evaluate(eta) - alpha).abs() > INVERT_TOL {
        return Err(Error::NoBracket { alpha });
    }
    Ok(eta)
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `sample` and the continuous CDF `cdf`.
pub fn ks_statistic(sample: &[f64], cdf: impl Fn(f64) -> f64) -> f64 {
    let mut sorted = sample.to_vec();
    sorted.sort_by(f64::total_cmp);
    let n = sorted.len() as f64;
    sorted
        .iter()
        .enumerate()
        .map(|(i, &x)| {
            let f = cdf(x);
            (f - i as f64 / n).max((i + 1) as f64 / n - f)
        })
        .fold(0.0, f64::max)
}

/// Runs `reps` independent replicates of `pit`, each with its own stream
/// derived from `seed`, and returns the KS distance of the resulting values
/// to Uniform(0, 1). `pit` simulates one dataset and returns `C(η_true; Y)`.
pub fn uniformity_check<F>(reps: usize, seed: u64, mut pit: F) -> Result<f64>
where
    F: FnMut(&mut Rng) -> Result<f64>,
{
    if reps < 100 {
        return Err(Error::out_of_range("reps", reps, "≥ 100"));
    }
    let values = (0..reps)
        .map(|r| pit(&mut rng::replicate(seed, r as u64)))
        .collect::<Result<Vec<_>>>()?;
    Ok(ks_statistic(&values, |u| u.clamp(0.0, 1.0)))
}

/// Normal sample of size `n` with mean `eta` and standard deviation `sigma`;
/// the curve is built assuming standard deviation `assumed_sigma`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct NormalMeanScenario {
    pub eta: f64,
    pub sigma: f64,
    pub n: usize,
    pub assumed_sigma: f64,
}

impl NormalMeanScenario {
    pub fn pit(&self, rng: &mut Rng) -> Result<f64> {
        let data: Vec<f64> = (0..self.n)
            .map(|_| self.eta + self.sigma * rng.sample::<f64, _>(StandardNormal))
            .collect();
        Ok(normal_mean_confidence(&data, self.assumed_sigma)?.evaluate(self.eta))
    }
}

/// `y = intercept + xᵀβ + σε` with standard normal predictors, redrawn per
/// replicate; the curve targets `β[coef_index]`.
#[derive(Debug, Clone, PartialEq)]
pub struct RegressionScenario {
    pub beta: DVector<f64>,
    pub intercept: f64,
    pub noise_sd: f64,
    pub n: usize,
    pub coef_index: usize,
}

impl RegressionScenario {
    pub fn pit(&self, rng: &mut Rng) -> Result<f64> {
        let p = self.beta.len();
        let x = standard_normal_matrix(self.n, p, rng);
        let noise = standard_normal_matrix(self.n, 1, rng);
        let y = (&x * &self.beta).add_scalar(self.intercept) + noise.column(0) * self.noise_sd;
        let curve = regression_coef_confidence(&Dataset::new(x, y)?, self.coef_index)?;
        Ok(curve.evaluate(self.beta[self.coef_index]))
    }
}
