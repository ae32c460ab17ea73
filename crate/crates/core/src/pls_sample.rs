//! Empirical partial least squares for a scalar response.
//!
//! Starting from the centered residuals `e₀ = X − x̄`, `f₀ = y − ȳ`, each step
//! computes a raw covariance weight `wₐ = Ĉov(eₐ₋₁, fₐ₋₁)`, scores
//! `tₐ = eₐ₋₁wₐ`, least-squares loadings `pₐ`, `qₐ` on those scores, and
//! deflates both residuals. Weights are left unnormalized; predictions do not
//! depend on their length.

use nalgebra::{DMatrix, DVector};
use rand::seq::SliceRandom;

use crate::data_model::{Dataset, Denominator};
use crate::rng;
use crate::{Error, Result};

/// Relative threshold for the early-stop tests on weight norm and score
/// variance, and for the step-one degeneracy test.
pub const STOP_TOL: f64 = 1e-12;

/// Two PRESS values closer than this multiple of the total centered sum of
/// squares of `y` are treated as tied when choosing the number of components.
pub const PRESS_TIE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, Default)]
pub struct PlsOptions {
    pub denominator: Denominator,
}

/// Why the recursion ended.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum StopReason {
    /// All requested steps were taken.
    Completed,
    /// `y` has no sample covariance with any predictor; no step was taken.
    Degenerate,
    /// The next weight vector vanished.
    ZeroWeight,
    /// The next score vector had vanishing variance.
    ZeroScoreVariance,
}

#[derive(Debug, Clone)]
pub struct PlsFit {
    /// Steps actually taken.
    pub m: usize,
    pub requested: usize,
    pub stop: StopReason,
    pub weights: Vec<DVector<f64>>,
    pub scores: Vec<DVector<f64>>,
    pub x_loadings: Vec<DVector<f64>>,
    pub y_loadings: Vec<f64>,
    pub mean_x: DVector<f64>,
    pub mean_y: f64,
    /// `e_m`, `n × p`.
    pub x_residual: DMatrix<f64>,
    /// `f_m`.
    pub y_residual: DVector<f64>,
    /// Weights re-expressed on the centered predictors: `tₐ(x) = (x − x̄)ᵀrₐ`.
    pub rotations: Vec<DVector<f64>>,
    pub implied_beta: DVector<f64>,
}

impl PlsFit {
    pub fn is_degenerate(&self) -> bool {
        self.stop == StopReason::Degenerate
    }

    pub fn p(&self) -> usize {
        self.mean_x.len()
    }

    /// Score-propagation prediction: deflates `x0 − x̄` through the fitted
    /// weights and loadings and returns `ȳ + Σ qₐt̂ₐ`.
    ///
    /// Panics if `x0` does not have `p` entries.
    pub fn predict(&self, x0: &DVector<f64>) -> f64 {
        *self.predict_path(x0).last().expect("path is never empty")
    }

    /// Predictions after `0, 1, ..., m` components.
    pub fn predict_path(&self, x0: &DVector<f64>) -> Vec<f64> {
        assert_eq!(x0.len(), self.p(), "x0 has the wrong dimension");
        let mut e = x0 - &self.mean_x;
        let mut yhat = self.mean_y;
        let mut path = Vec::with_capacity(self.m + 1);
        path.push(yhat);
        for a in 0..self.m {
            let t = e.dot(&self.weights[a]);
            yhat += self.y_loadings[a] * t;
            e.axpy(-t, &self.x_loadings[a], 1.0);
            path.push(yhat);
        }
        path
    }

    /// Coefficient vector after the first `k` components (clamped to `m`).
    pub fn beta_after(&self, k: usize) -> DVector<f64> {
        let mut beta = DVector::zeros(self.p());
        for a in 0..k.min(self.m) {
            beta.axpy(self.y_loadings[a], &self.rotations[a], 1.0);
        }
        beta
    }

    pub fn intercept(&self) -> f64 {
        self.mean_y - self.implied_beta.dot(&self.mean_x)
    }
}

pub fn pls_fit(d: &Dataset, m: usize) -> Result<PlsFit> {
    pls_fit_with(d, m, PlsOptions::default())
}

pub fn pls_fit_with(d: &Dataset, m: usize, options: PlsOptions) -> Result<PlsFit> {
    let n = d.n();
    let p = d.p();
    if n < 2 {
        return Err(Error::InsufficientRows(n));
    }
    let max_m = (n - 1).min(p);
    if m == 0 || m > max_m {
        return Err(Error::out_of_range("m", m, format!("1 ≤ m ≤ {max_m}")));
    }
    let den = options.denominator.value(n);
    let (centered, means) = d.center();
    let mut e = centered.x().clone();
    let mut f = centered.y().clone();

    let cov_xy = e.transpose() * &f / den;
    let trace_xx = e.iter().map(|v| v * v).sum::<f64>() / den;
    let var_y = f.dot(&f) / den;
    let cov_xy_norm = cov_xy.norm();

    let mut fit = PlsFit {
        m: 0,
        requested: m,
        stop: StopReason::Completed,
        weights: Vec::new(),
        scores: Vec::new(),
        x_loadings: Vec::new(),
        y_loadings: Vec::new(),
        mean_x: means.x,
        mean_y: means.y,
        x_residual: DMatrix::zeros(n, p),
        y_residual: DVector::zeros(n),
        rotations: Vec::new(),
        implied_beta: DVector::zeros(p),
    };

    if cov_xy_norm <= STOP_TOL * (trace_xx * var_y).sqrt() {
        fit.stop = StopReason::Degenerate;
        fit.x_residual = e;
        fit.y_residual = f;
        return Ok(fit);
    }

    for a in 0..m {
        let w = if a == 0 {
            cov_xy.clone()
        } else {
            e.transpose() * &f / den
        };
        let w_norm = w.norm();
        if w_norm <= STOP_TOL * cov_xy_norm {
            fit.stop = StopReason::ZeroWeight;
            break;
        }
        let t = &e * &w;
        let tt = t.dot(&t);
        if tt / den <= STOP_TOL * w_norm * w_norm * trace_xx {
            fit.stop = StopReason::ZeroScoreVariance;
            break;
        }
        // Ĉov(e, t) / V̂ar(t); the denominators cancel.
        let p_a = e.transpose() * &t / tt;
        let q_a = f.dot(&t) / tt;
        e -= &t * p_a.transpose();
        f.axpy(-q_a, &t, 1.0);

        let mut r = w.clone();
        for (p_b, r_b) in fit.x_loadings.iter().zip(&fit.rotations) {
            r.axpy(-p_b.dot(&w), r_b, 1.0);
        }
        fit.implied_beta.axpy(q_a, &r, 1.0);
        fit.rotations.push(r);
        fit.weights.push(w);
        fit.scores.push(t);
        fit.x_loadings.push(p_a);
        fit.y_loadings.push(q_a);
        fit.m += 1;
    }
    fit.x_residual = e;
    fit.y_residual = f;
    Ok(fit)
}

/// Zero for a fit with no components.
pub fn implied_beta(fit: &PlsFit) -> DVector<f64> {
    fit.implied_beta.clone()
}

pub fn predict(fit: &PlsFit, x0: &DVector<f64>) -> f64 {
    fit.predict(x0)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BilinearError {
    pub x: f64,
    pub y: f64,
}

impl BilinearError {
    pub fn max(&self) -> f64 {
        self.x.max(self.y)
    }
}

/// Largest entrywise deviation from `x = x̄ + Σ tₐpₐᵀ + e_m` and
/// `y = ȳ + Σ qₐtₐ + f_m`.
pub fn bilinear_check(fit: &PlsFit, d: &Dataset) -> Result<BilinearError> {
    let (n, p) = (d.n(), d.p());
    if fit.p() != p || fit.x_residual.shape() != (n, p) || fit.y_residual.len() != n {
        return Err(Error::Shape(format!(
            "fit is for {}×{} data, dataset is {n}×{p}",
            fit.x_residual.nrows(),
            fit.p()
        )));
    }
    let mut x = d.x().clone();
    for (j, mut col) in x.column_iter_mut().enumerate() {
        col.add_scalar_mut(-fit.mean_x[j]);
    }
    let mut y = d.y().add_scalar(-fit.mean_y);
    for a in 0..fit.m {
        x -= &fit.scores[a] * fit.x_loadings[a].transpose();
        y.axpy(-fit.y_loadings[a], &fit.scores[a], 1.0);
    }
    x -= &fit.x_residual;
    y -= &fit.y_residual;
    Ok(BilinearError {
        x: x.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())),
        y: y.iter().fold(0.0_f64, |acc, v| acc.max(v.abs())),
    })
}

/// `10`, or `n` (leave-one-out) when `n < 10`.
pub fn default_folds(n: usize) -> usize {
    n.min(10)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CrossValidation {
    pub m_star: usize,
    /// PRESS for `m = 1, ..., m_max`; entry `i` belongs to `m = i + 1`.
    pub press: Vec<f64>,
    pub folds: usize,
}

/// Seeded k-fold cross-validation of the number of components.
///
/// Rows are shuffled once with `seed` and dealt round-robin into `folds`
/// groups. `m_star` is the smallest `m` whose PRESS is within
/// [`PRESS_TIE_TOL`] of the minimum.
pub fn cross_validate(d: &Dataset, m_max: usize, folds: usize, seed: u64) -> Result<CrossValidation> {
    let n = d.n();
    if folds < 2 || folds > n {
        return Err(Error::out_of_range("folds", folds, format!("2 ≤ folds ≤ {n}")));
    }
    let largest_fold = n.div_ceil(folds);
    let limit = (n - largest_fold).saturating_sub(1).min(d.p());
    if m_max == 0 || m_max > limit {
        return Err(Error::out_of_range("m_max", m_max, format!("1 ≤ m_max ≤ {limit}")));
    }

    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng::seeded(seed));
    let mut groups = vec![Vec::new(); folds];
    for (i, &row) in order.iter().enumerate() {
        groups[i % folds].push(row);
    }

    let mut press = vec![0.0; m_max];
    for (k, held_out) in groups.iter().enumerate() {
        let train_rows: Vec<usize> = groups
            .iter()
            .enumerate()
            .filter(|&(j, _)| j != k)
            .flat_map(|(_, g)| g)
            .copied()
            .collect();
        let fit = pls_fit(&d.select_rows(&train_rows), m_max)?;
        for &row in held_out {
            let x0 = d.x().row(row).transpose();
            let path = fit.predict_path(&x0);
            for (k, slot) in press.iter_mut().enumerate() {
                let yhat = path[(k + 1).min(fit.m)];
                let resid = d.y()[row] - yhat;
                *slot += resid * resid;
            }
        }
    }

    let mean_y = d.y().mean();
    let ss_y: f64 = d.y().iter().map(|v| (v - mean_y).powi(2)).sum();
    let best = press.iter().copied().fold(f64::INFINITY, f64::min);
    let m_star = press
        .iter()
        .position(|&v| v <= best + PRESS_TIE_TOL * ss_y)
        .map_or(1, |i| i + 1);
    Ok(CrossValidation {
        m_star,
        press,
        folds,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data_model::ols_fit;
    use crate::linalg::standard_normal_matrix;
    use crate::rng::seeded;

    fn random_dataset(n: usize, p: usize, seed: u64) -> Dataset {
        let mut rng = seeded(seed);
        let x = standard_normal_matrix(n, p, &mut rng);
        let noise = standard_normal_matrix(n, 1, &mut rng);
        let beta = DVector::from_fn(p, |j, _| 1.0 - 0.3 * j as f64);
        let y = &x * &beta + noise.column(0) * 0.5;
        Dataset::new(x, y).unwrap()
    }

    #[test]
    fn single_predictor_exact_line() {
        let d = Dataset::new(
            DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]),
            DVector::from_vec(vec![2.0, 4.0, 6.0]),
        )
        .unwrap();
        let fit = pls_fit(&d, 1).unwrap();
        assert_eq!(fit.m, 1);
        assert!((fit.implied_beta[0] - 2.0).abs() < 1e-14);
        assert!(fit.y_residual.iter().all(|v| v.abs() < 1e-14));
    }

    #[test]
    fn zero_covariance_gives_degenerate_fit() {
        let d = Dataset::new(
            DMatrix::from_column_slice(3, 1, &[1.0, 2.0, 3.0]),
            DVector::from_vec(vec![1.0, -2.0, 1.0]),
        )
        .unwrap();
        let fit = pls_fit(&d, 1).unwrap();
        assert_eq!(fit.m, 0);
        assert!(fit.is_degenerate());
        assert!(fit.implied_beta.iter().all(|&b| b == 0.0));
        assert_eq!(fit.predict(&DVector::from_vec(vec![10.0])), 0.0);
        assert_eq!(bilinear_check(&fit, &d).unwrap().max(), 0.0);
    }

    #[test]
    fn m_out_of_range() {
        let d = random_dataset(5, 3, 1);
        assert!(matches!(pls_fit(&d, 0), Err(Error::OutOfRange { .. })));
        assert!(matches!(pls_fit(&d, 4), Err(Error::OutOfRange { .. })));
        let d = random_dataset(3, 5, 1);
        assert!(matches!(pls_fit(&d, 3), Err(Error::OutOfRange { .. })));
    }

    #[test]
    fn full_rank_matches_ols() {
        let d = random_dataset(20, 3, 11);
        let pls = pls_fit(&d, 3).unwrap();
        let ols = ols_fit(&d).unwrap();
        let rel = (&pls.implied_beta - &ols.beta).norm() / ols.beta.norm();
        assert!(rel < 1e-8, "relative error {rel}");
    }

    #[test]
    fn score_orthogonality_and_deflation_bookkeeping() {
        let d = random_dataset(30, 5, 4);
        let fit = pls_fit(&d, 4).unwrap();
        for a in 0..fit.m {
            for b in 0..a {
                let (ta, tb) = (&fit.scores[a], &fit.scores[b]);
                assert!(ta.dot(tb).abs() <= 1e-8 * ta.norm() * tb.norm());
            }
        }
        let err = bilinear_check(&fit, &d).unwrap();
        assert!(err.max() <= 1e-10 * d.x().amax().max(d.y().amax()));
    }

    #[test]
    fn perturbed_loadings_break_reconstruction() {
        let d = random_dataset(25, 4, 8);
        let mut fit = pls_fit(&d, 2).unwrap();
        fit.x_loadings[0].add_scalar_mut(1e-3);
        assert!(bilinear_check(&fit, &d).unwrap().x > 1e-5);
    }

    #[test]
    fn bilinear_check_rejects_other_shapes() {
        let fit = pls_fit(&random_dataset(10, 3, 1), 2).unwrap();
        let other = random_dataset(12, 3, 2);
        assert!(matches!(bilinear_check(&fit, &other), Err(Error::Shape(_))));
    }

    #[test]
    fn single_predictor_beta_is_covariance_ratio() {
        let d = random_dataset(15, 1, 3);
        let m = d.sample_moments().unwrap();
        let fit = pls_fit(&d, 1).unwrap();
        let expected = m.cov_xy[0] / m.cov_xx[(0, 0)];
        assert!((fit.implied_beta[0] - expected).abs() <= 1e-12 * expected.abs());
    }

    #[test]
    fn prediction_at_mean_is_mean_response() {
        let d = random_dataset(20, 4, 5);
        let fit = pls_fit(&d, 2).unwrap();
        assert!((fit.predict(&fit.mean_x) - fit.mean_y).abs() < 1e-12);
    }

    #[test]
    fn exact_fit_interpolates_training_rows() {
        let mut rng = seeded(9);
        let x = standard_normal_matrix(12, 3, &mut rng);
        let y = &x * DVector::from_vec(vec![1.0, -2.0, 0.5]);
        let d = Dataset::new(x, y.add_scalar(4.0)).unwrap();
        let fit = pls_fit(&d, 3).unwrap();
        for i in 0..d.n() {
            let yhat = fit.predict(&d.x().row(i).transpose());
            assert!((yhat - d.y()[i]).abs() < 1e-10);
        }
    }

    #[test]
    fn cv_validates_parameters() {
        let d = random_dataset(20, 4, 1);
        assert!(cross_validate(&d, 2, 1, 0).is_err());
        assert!(cross_validate(&d, 2, 21, 0).is_err());
        assert!(cross_validate(&d, 0, 5, 0).is_err());
        assert!(cross_validate(&d, 5, 5, 0).is_err());
        // n − ceil(n/folds) − 1 = 20 − 10 − 1 = 9, so p = 4 binds.
        assert!(cross_validate(&d, 4, 2, 0).is_ok());
    }

    #[test]
    fn cv_is_deterministic() {
        let d = random_dataset(30, 4, 2);
        let a = cross_validate(&d, 4, 5, 17).unwrap();
        let b = cross_validate(&d, 4, 5, 17).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.press.len(), 4);
    }

    #[test]
    fn default_folds_switches_to_leave_one_out() {
        assert_eq!(default_folds(7), 7);
        assert_eq!(default_folds(50), 10);
    }
}
