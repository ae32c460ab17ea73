//! Envelope parameterization of the predictor covariance:
//! `Σ_X = ΦΔΦᵀ + Φ₀Δ₀Φ₀ᵀ`, `B = Φη`, with `[Φ Φ₀]` orthogonal.
//!
//! `span(Φ)` is a reducing subspace of `Σ_X` that contains the regression
//! coefficients; the population PLS Krylov space is one such subspace.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::data_model::Dataset;
use crate::linalg::{is_spd, orthonormal_completion, orthonormality_defect, symmetrize};
use crate::pls_population::{krylov_space, KrylovGenerator, PopulationRegression};
use crate::rng;
use crate::{Error, Result};

/// Largest tolerated deviation of `ΦᵀΦ` from the identity in
/// [`build_envelope`].
pub const ORTHONORMAL_TOL: f64 = 1e-8;

/// Relative Frobenius tolerance for `ΦΔΦᵀ + Φ₀Δ₀Φ₀ᵀ = Σ_x` in
/// [`envelope_from_krylov`].
pub const RECONSTRUCTION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct EnvelopeSpec {
    pub phi: DMatrix<f64>,
    pub phi0: DMatrix<f64>,
    pub delta: DMatrix<f64>,
    pub delta0: DMatrix<f64>,
    /// `m × r`.
    pub eta: DMatrix<f64>,
}

impl EnvelopeSpec {
    pub fn p(&self) -> usize {
        self.phi.nrows()
    }

    /// Envelope dimension.
    pub fn m(&self) -> usize {
        self.phi.ncols()
    }

    pub fn sigma_x(&self) -> DMatrix<f64> {
        let material = &self.phi * &self.delta * self.phi.transpose();
        let immaterial = &self.phi0 * &self.delta0 * self.phi0.transpose();
        symmetrize(&(material + immaterial))
    }

    /// `B = Φη`, `p × r`.
    pub fn b(&self) -> DMatrix<f64> {
        &self.phi * &self.eta
    }
}

pub fn build_envelope(
    phi: DMatrix<f64>,
    delta: DMatrix<f64>,
    delta0: DMatrix<f64>,
    eta: DMatrix<f64>,
) -> Result<EnvelopeSpec> {
    let (p, m) = phi.shape();
    if m == 0 || m > p {
        return Err(Error::Shape(format!("phi is {p}×{m}; need 1 ≤ m ≤ p")));
    }
    if delta.shape() != (m, m) || delta0.shape() != (p - m, p - m) || eta.nrows() != m {
        return Err(Error::Shape(format!(
            "phi is {p}×{m} but delta is {:?}, delta0 is {:?}, eta is {:?}",
            delta.shape(),
            delta0.shape(),
            eta.shape()
        )));
    }
    let defect = orthonormality_defect(&phi);
    if defect > ORTHONORMAL_TOL {
        return Err(Error::InvalidModel(format!(
            "phi columns are not orthonormal (Gram deviation {defect:.3e})"
        )));
    }
    if !is_spd(&delta) {
        return Err(Error::InvalidModel("delta is not symmetric positive definite".into()));
    }
    if !is_spd(&delta0) {
        return Err(Error::InvalidModel("delta0 is not symmetric positive definite".into()));
    }
    let phi0 = orthonormal_completion(&phi);
    Ok(EnvelopeSpec {
        phi,
        phi0,
        delta: symmetrize(&delta),
        delta0: symmetrize(&delta0),
        eta,
    })
}

/// Envelope spanned by the covariance-generated Krylov basis of `model`.
pub fn envelope_from_krylov(model: &PopulationRegression, tol: f64) -> Result<EnvelopeSpec> {
    let krylov = krylov_space(model, KrylovGenerator::Covariance, tol)?;
    if krylov.dim == 0 {
        return Err(Error::EmptyEnvelope);
    }
    let sigma = model.sigma_x();
    let phi = krylov.basis;
    let phi0 = orthonormal_completion(&phi);
    let delta = symmetrize(&(phi.transpose() * sigma * &phi));
    let delta0 = symmetrize(&(phi0.transpose() * sigma * &phi0));
    let eta = DMatrix::from_column_slice(phi.ncols(), 1, (phi.transpose() * model.beta()).as_slice());
    let rebuilt = &phi * &delta * phi.transpose() + &phi0 * &delta0 * phi0.transpose();
    let error = (rebuilt - sigma).norm() / sigma.norm();
    if error > RECONSTRUCTION_TOL {
        return Err(Error::EnvelopeReconstruction(error));
    }
    build_envelope(phi, delta, delta0, eta)
}

/// Relative Frobenius error of `ΦΔΦᵀ + Φ₀Δ₀Φ₀ᵀ` against `sigma_x`.
pub fn reconstruction_error(spec: &EnvelopeSpec, sigma_x: &DMatrix<f64>) -> f64 {
    (spec.sigma_x() - sigma_x).norm() / sigma_x.norm()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EnvelopeConditions {
    /// `span(B) ⊆ span(Φ)`.
    pub contains_b: bool,
    /// `Σ_x span(Φ) ⊆ span(Φ)`.
    pub reducing: bool,
}

pub fn check_envelope_conditions(
    sigma_x: &DMatrix<f64>,
    b: &DMatrix<f64>,
    phi: &DMatrix<f64>,
    tol: f64,
) -> EnvelopeConditions {
    let p = phi.nrows();
    let outside = DMatrix::identity(p, p) - phi * phi.transpose();
    let contains_b = (&outside * b).norm() <= tol * b.norm();
    let reducing = (&outside * sigma_x * phi).norm() <= tol * sigma_x.norm();
    EnvelopeConditions {
        contains_b,
        reducing,
    }
}

/// Draws `n` rows `x ~ N(0, Σ_X)` and `y = xᵀB + ε`, `ε ~ N(0, noise_var)`.
/// Only scalar responses (`r = 1`) can be sampled.
pub fn sample_from_envelope(spec: &EnvelopeSpec, n: usize, noise_var: f64, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, "≥ 2"));
    }
    if !(noise_var > 0.0 && noise_var.is_finite()) {
        return Err(Error::out_of_range("noise_var", noise_var, "> 0"));
    }
    if spec.eta.ncols() != 1 {
        return Err(Error::Shape(format!(
            "sampling needs a scalar response, eta has {} columns",
            spec.eta.ncols()
        )));
    }
    let b = DVector::from_column_slice(spec.b().as_slice());
    sample_regression(&spec.sigma_x(), &b, 0.0, noise_var, n, seed)
}

/// Draws `n` rows from the population regression model:
/// `x ~ N(μ_x, Σ_x)`, `y = μ_y + βᵀ(x − μ_x) + ε`.
pub fn sample_population(model: &PopulationRegression, n: usize, seed: u64) -> Result<Dataset> {
    if n < 2 {
        return Err(Error::out_of_range("n", n, "≥ 2"));
    }
    let data = sample_regression(model.sigma_x(), model.beta(), model.mu_y(), model.noise_var(), n, seed)?;
    let mut x = data.x().clone();
    for (j, mut col) in x.column_iter_mut().enumerate() {
        col.add_scalar_mut(model.mu_x()[j]);
    }
    Dataset::new(x, data.y().clone())
}

fn sample_regression(
    sigma: &DMatrix<f64>,
    b: &DVector<f64>,
    mu_y: f64,
    noise_var: f64,
    n: usize,
    seed: u64,
) -> Result<Dataset> {
    let p = sigma.nrows();
    let l = sigma
        .clone()
        .cholesky()
        .ok_or_else(|| Error::InvalidModel("covariance is not positive definite".into()))?
        .l();
    let mut rng = rng::seeded(seed);
    let noise_sd = noise_var.sqrt();
    let mut x = DMatrix::zeros(n, p);
    let mut y = DVector::zeros(n);
    for i in 0..n {
        let z = DVector::from_fn(p, |_, _| rng.sample::<f64, _>(StandardNormal));
        let row = &l * z;
        let eps: f64 = rng.sample(StandardNormal);
        y[i] = mu_y + row.dot(b) + noise_sd * eps;
        for j in 0..p {
            x[(i, j)] = row[j];
        }
    }
    Dataset::new(x, y)
}
