use rand::Rng as _;
use rand_distr::{Exp1, StandardNormal};

use crate::rng::{self, Rng};
use crate::{Error, Result};

/// A data-generating model `y = y(η, u)` with `u` of known distribution and a
/// unique solution `η = η(y, u)`.
pub trait FiducialModel {
    fn structural(&self, eta: f64, u: f64) -> f64;
    fn sample_u(&self, rng: &mut Rng) -> f64;
    /// `None` when `(y, u)` admits no solution.
    fn inverse(&self, y: f64, u: f64) -> Option<f64>;
}

/// `y = η + u`, `u ~ N(0, 1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct LocationModel;

impl FiducialModel for LocationModel {
    fn structural(&self, eta: f64, u: f64) -> f64 {
        eta + u
    }

    fn sample_u(&self, rng: &mut Rng) -> f64 {
        rng.sample(StandardNormal)
    }

    fn inverse(&self, y: f64, u: f64) -> Option<f64> {
        Some(y - u)
    }
}

/// `y = η·u` with `η > 0` and `u ~ Exp(1)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct ScaleModel;

impl FiducialModel for ScaleModel {
    fn structural(&self, eta: f64, u: f64) -> f64 {
        eta * u
    }

    fn sample_u(&self, rng: &mut Rng) -> f64 {
        rng.sample(Exp1)
    }

    fn inverse(&self, y: f64, u: f64) -> Option<f64> {
        (y > 0.0 && u > 0.0 && u.is_finite()).then(|| y / u)
    }
}

/// Draws of `η(y_observed, u)`, sorted ascending.
#[derive(Debug, Clone, PartialEq)]
pub struct FiducialSample {
    values: Vec<f64>,
}

impl FiducialSample {
    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Empirical CDF.
    pub fn cdf(&self, eta: f64) -> f64 {
        self.values.partition_point(|&v| v <= eta) as f64 / self.values.len() as f64
    }
}

/// The fiducial distribution of `η` for fixed `y_observed`, by simulation
/// of `u`.
pub fn fiducial_distribution<M: FiducialModel + ?Sized>(
    model: &M,
    y_observed: f64,
    draws: usize,
    seed: u64,
) -> Result<FiducialSample> {
    if draws == 0 {
        return Err(Error::out_of_range("draws", draws, "≥ 1"));
    }
    let mut rng = rng::seeded(seed);
    let mut values = Vec::with_capacity(draws);
    for _ in 0..draws {
        let u = model.sample_u(&mut rng);
        let eta = model
            .inverse(y_observed, u)
            .filter(|e| e.is_finite())
            .ok_or(Error::InverseFailed { u })?;
        values.push(eta);
    }
    values.sort_by(f64::total_cmp);
    Ok(FiducialSample { values })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::confidence::{ks_statistic, normal_mean_confidence};

    #[test]
    fn location_fiducial_mean() {
        let sample = fiducial_distribution(&LocationModel, 3.0, 100_000, 1).unwrap();
        assert!((sample.mean() - 3.0).abs() <= 0.02);
    }

    #[test]
    fn scale_fiducial_is_positive() {
        let sample = fiducial_distribution(&ScaleModel, 2.5, 10_000, 2).unwrap();
        assert!(sample.values().iter().all(|&v| v > 0.0));
    }

    #[test]
    fn scale_inverse_fails_for_nonpositive_observation() {
        let err = fiducial_distribution(&ScaleModel, -1.0, 10, 2).unwrap_err();
        assert!(matches!(err, Error::InverseFailed { .. }));
    }

    #[test]
    fn location_fiducial_matches_confidence_curve() {
        let sample = fiducial_distribution(&LocationModel, 3.0, 100_000, 3).unwrap();
        let curve = normal_mean_confidence(&[3.0], 1.0).unwrap();
        let ks = ks_statistic(sample.values(), |eta| curve.evaluate(eta));
        assert!(ks <= 0.02, "KS = {ks}");
    }

    #[test]
    fn round_trip_of_structural_map() {
        let mut rng = rng::seeded(5);
        for _ in 0..1000 {
            let eta: f64 = rng.random_range(-5.0..5.0);
            let u = LocationModel.sample_u(&mut rng);
            let back = LocationModel.inverse(LocationModel.structural(eta, u), u).unwrap();
            assert!((back - eta).abs() <= 1e-10);

            let eta: f64 = rng.random_range(0.1..5.0);
            let u = ScaleModel.sample_u(&mut rng);
            let back = ScaleModel.inverse(ScaleModel.structural(eta, u), u).unwrap();
            assert!((back - eta).abs() <= 1e-10 * eta.max(1.0));
        }
    }

    #[test]
    fn deterministic() {
        let a = fiducial_distribution(&LocationModel, 0.0, 50, 9).unwrap();
        let b = fiducial_distribution(&LocationModel, 0.0, 50, 9).unwrap();
        assert_eq!(a, b);
        assert!((a.cdf(f64::INFINITY) - 1.0).abs() < 1e-15);
    }
}
