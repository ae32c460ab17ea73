//! Partial least squares on exact second moments.
//!
//! For the random-x model `y = μ_y + βᵀ(x − μ_x) + ε` with `Cov(x) = Σ_x` and
//! `Var(ε) = σ²`, the sample recursion can be run on population moments.
//! Residual variables are carried as coefficient vectors on the centered
//! predictors: `eₐ = Aₐ(x − μ_x)` and `fₐ = gₐᵀ(x − μ_x) + ε`. The recursion
//! stops by itself once `gₐ` vanishes; the step at which that happens equals
//! both the number of distinct eigenvalues of `Σ_x` whose eigenspaces carry
//! part of `β`, and the dimension of the Krylov space generated from `Σ_xβ`
//! (or `Σ_x⁻¹β`).

use nalgebra::{DMatrix, DVector};
use rand::seq::index::sample;
use rand::Rng as _;

use crate::linalg::{asymmetry, max_abs, random_orthogonal, sym_eigen_desc, symmetrize};
use crate::rng::Rng;
use crate::{Error, Result};

/// `‖g_a‖ ≤ STOP_TOL·‖β‖` declares the response residual free of `x`.
pub const STOP_TOL: f64 = 1e-10;

/// Default admission threshold for new Krylov directions.
pub const KRYLOV_TOL: f64 = 1e-8;

#[derive(Debug, Clone, PartialEq)]
pub struct PopulationRegression {
    sigma_x: DMatrix<f64>,
    beta: DVector<f64>,
    noise_var: f64,
    mu_x: DVector<f64>,
    mu_y: f64,
}

impl PopulationRegression {
    pub fn new(sigma_x: DMatrix<f64>, beta: DVector<f64>, noise_var: f64) -> Result<Self> {
        let p = beta.len();
        Self::with_means(sigma_x, beta, noise_var, DVector::zeros(p), 0.0)
    }

    pub fn with_means(
        sigma_x: DMatrix<f64>,
        beta: DVector<f64>,
        noise_var: f64,
        mu_x: DVector<f64>,
        mu_y: f64,
    ) -> Result<Self> {
        let p = beta.len();
        if p == 0 {
            return Err(Error::InvalidModel("no predictors".into()));
        }
        if sigma_x.shape() != (p, p) || mu_x.len() != p {
            return Err(Error::Shape(format!(
                "sigma_x is {:?}, beta has {p} entries, mu_x has {}",
                sigma_x.shape(),
                mu_x.len()
            )));
        }
        let all_finite = sigma_x.iter().chain(beta.iter()).chain(mu_x.iter()).all(|v| v.is_finite())
            && mu_y.is_finite();
        if !all_finite {
            return Err(Error::InvalidModel("non-finite parameter".into()));
        }
        if !(noise_var > 0.0 && noise_var.is_finite()) {
            return Err(Error::InvalidModel(format!("noise variance {noise_var} must be positive")));
        }
        if asymmetry(&sigma_x) > 1e-12 * max_abs(&sigma_x).max(1.0) {
            return Err(Error::InvalidModel("sigma_x is not symmetric".into()));
        }
        let sigma_x = symmetrize(&sigma_x);
        let (eigenvalues, _) = sym_eigen_desc(&sigma_x);
        let (largest, smallest) = (eigenvalues[0], eigenvalues[p - 1]);
        if !(largest > 0.0 && smallest > 1e-10 * largest) {
            return Err(Error::InvalidModel(format!(
                "sigma_x is not positive definite (eigenvalues in [{smallest:.3e}, {largest:.3e}])"
            )));
        }
        Ok(Self {
            sigma_x,
            beta,
            noise_var,
            mu_x,
            mu_y,
        })
    }

    /// A model with distinct, well separated eigenvalues in `[1, 10]` and a
    /// coefficient vector with nonzero projection on exactly `relevant`
    /// eigenvectors.
    pub fn random(p: usize, relevant: usize, rng: &mut Rng) -> Result<Self> {
        let multiplicities = vec![1; p];
        Self::random_grouped(&multiplicities, relevant, rng)
    }

    /// Like [`random`](Self::random), but eigenvalue level `i` is repeated
    /// `multiplicities[i]` times; `relevant` of the levels receive a nonzero
    /// share of `β`, spread randomly within their eigenspace.
    pub fn random_grouped(multiplicities: &[usize], relevant: usize, rng: &mut Rng) -> Result<Self> {
        let levels = multiplicities.len();
        let p: usize = multiplicities.iter().sum();
        if levels == 0 || multiplicities.contains(&0) {
            return Err(Error::InvalidModel("every eigenvalue level needs multiplicity ≥ 1".into()));
        }
        if relevant > levels {
            return Err(Error::out_of_range("relevant", relevant, format!("≤ {levels}")));
        }
        let spacing = 9.0 / levels as f64;
        let level_values: Vec<f64> = (0..levels)
            .map(|i| 1.0 + spacing * (i as f64 + 0.25 + 0.5 * rng.random::<f64>()))
            .collect();
        let q = random_orthogonal(p, rng);
        let mut eigenvalues = DVector::zeros(p);
        let mut blocks = Vec::with_capacity(levels);
        let mut start = 0;
        for (&value, &mult) in level_values.iter().zip(multiplicities) {
            for j in start..start + mult {
                eigenvalues[j] = value;
            }
            blocks.push(start..start + mult);
            start += mult;
        }
        let sigma_x = &q * DMatrix::from_diagonal(&eigenvalues) * q.transpose();
        let mut beta = DVector::zeros(p);
        for level in sample(rng, levels, relevant) {
            let mut direction = DVector::<f64>::zeros(p);
            for j in blocks[level].clone() {
                let c: f64 = rng.sample(rand_distr::StandardNormal);
                direction.axpy(c, &q.column(j), 1.0);
            }
            let magnitude = 0.5 + 1.5 * rng.random::<f64>();
            let sign = if rng.random::<bool>() { 1.0 } else { -1.0 };
            beta.axpy(sign * magnitude / direction.norm(), &direction, 1.0);
        }
        Self::new(symmetrize(&sigma_x), beta, 1.0)
    }

    pub fn p(&self) -> usize {
        self.beta.len()
    }

    pub fn sigma_x(&self) -> &DMatrix<f64> {
        &self.sigma_x
    }

    pub fn beta(&self) -> &DVector<f64> {
        &self.beta
    }

    pub fn noise_var(&self) -> f64 {
        self.noise_var
    }

    pub fn mu_x(&self) -> &DVector<f64> {
        &self.mu_x
    }

    pub fn mu_y(&self) -> f64 {
        self.mu_y
    }

    /// `Cov(x, y) = Σ_xβ`.
    pub fn cov_xy(&self) -> DVector<f64> {
        &self.sigma_x * &self.beta
    }

    /// `Var(y) = βᵀΣ_xβ + σ²`.
    pub fn var_y(&self) -> f64 {
        self.beta.dot(&self.cov_xy()) + self.noise_var
    }
}

#[derive(Debug, Clone)]
pub struct PopulationPls {
    /// Coefficient vector after each step; entry `a − 1` belongs to step `a`.
    pub betas: Vec<DVector<f64>>,
    pub weights: Vec<DVector<f64>>,
    /// `‖gₐ‖` after each step.
    pub residual_norms: Vec<f64>,
    /// Step at which the response residual stopped depending on `x`.
    pub stop: usize,
}

impl PopulationPls {
    /// Coefficient vector at the stop (zero when `stop == 0`).
    pub fn final_beta(&self, p: usize) -> DVector<f64> {
        self.betas.last().cloned().unwrap_or_else(|| DVector::zeros(p))
    }
}

pub fn population_pls(model: &PopulationRegression, max_steps: usize) -> Result<PopulationPls> {
    let p = model.p();
    if max_steps > p {
        return Err(Error::out_of_range("max_steps", max_steps, format!("≤ {p}")));
    }
    let sigma = &model.sigma_x;
    let threshold = STOP_TOL * model.beta.norm();
    let mut a_mat = DMatrix::<f64>::identity(p, p);
    let mut g = model.beta.clone();
    let mut beta_m = DVector::<f64>::zeros(p);
    let mut out = PopulationPls {
        betas: Vec::new(),
        weights: Vec::new(),
        residual_norms: Vec::new(),
        stop: 0,
    };
    if g.norm() <= threshold {
        return Ok(out);
    }
    for step in 1..=max_steps {
        // Cov(e, f) = AΣg, and t = wᵀe = cᵀ(x − μ_x) with c = Aᵀw.
        let w = &a_mat * (sigma * &g);
        let c = a_mat.transpose() * &w;
        let sigma_c = sigma * &c;
        let var_t = c.dot(&sigma_c);
        if var_t.is_nan() || var_t <= 0.0 {
            return Err(Error::NonConvergence {
                steps: step - 1,
                residual: g.norm(),
            });
        }
        let p_a = &a_mat * &sigma_c / var_t;
        let q_a = g.dot(&sigma_c) / var_t;
        a_mat -= &p_a * c.transpose();
        g.axpy(-q_a, &c, 1.0);
        beta_m.axpy(q_a, &c, 1.0);
        let residual = g.norm();
        out.betas.push(beta_m.clone());
        out.weights.push(w);
        out.residual_norms.push(residual);
        if residual <= threshold {
            out.stop = step;
            return Ok(out);
        }
    }
    Err(Error::NonConvergence {
        steps: max_steps,
        residual: g.norm(),
    })
}

/// Which vector starts the Krylov sequence.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum KrylovGenerator {
    /// `Σ_xβ`, the covariance between `x` and `y`.
    #[default]
    Covariance,
    /// `Σ_x⁻¹β`.
    Precision,
}

#[derive(Debug, Clone)]
pub struct KrylovResult {
    /// `p × dim`, orthonormal columns.
    pub basis: DMatrix<f64>,
    pub dim: usize,
    pub generator: DVector<f64>,
}

/// Orthonormal basis of `span{σ, Σ_xσ, Σ_x²σ, ...}`.
///
/// Arnoldi-style: each candidate is `Σ_x` applied to the newest basis vector,
/// orthogonalized twice by classical Gram–Schmidt, and admitted when its
/// remaining norm exceeds `tol` times its norm before projection.
pub fn krylov_space(model: &PopulationRegression, generator: KrylovGenerator, tol: f64) -> Result<KrylovResult> {
    if tol.is_nan() || tol <= 0.0 {
        return Err(Error::out_of_range("tol", tol, "> 0"));
    }
    let p = model.p();
    let sigma = &model.sigma_x;
    let start = match generator {
        KrylovGenerator::Covariance => model.cov_xy(),
        KrylovGenerator::Precision => sigma
            .clone()
            .cholesky()
            .ok_or_else(|| Error::InvalidModel("sigma_x is not positive definite".into()))?
            .solve(&model.beta),
    };
    let mut columns: Vec<DVector<f64>> = Vec::new();
    let norm = start.norm();
    if norm > 0.0 {
        columns.push(&start / norm);
    }
    while !columns.is_empty() && columns.len() < p {
        let mut v = sigma * columns.last().unwrap();
        let candidate_norm = v.norm();
        for _ in 0..2 {
            let coeffs: Vec<f64> = columns.iter().map(|q| q.dot(&v)).collect();
            for (q, c) in columns.iter().zip(coeffs) {
                v.axpy(-c, q, 1.0);
            }
        }
        let rest = v.norm();
        if rest <= tol * candidate_norm {
            break;
        }
        columns.push(v / rest);
    }
    let dim = columns.len();
    let basis = if dim == 0 {
        DMatrix::zeros(p, 0)
    } else {
        DMatrix::from_columns(&columns)
    };
    Ok(KrylovResult {
        basis,
        dim,
        generator: start,
    })
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComponentTolerances {
    /// Eigenvalues within `grouping · λ_max` of their neighbour share a group.
    pub grouping: f64,
    /// A group is relevant when `β`'s projection onto it exceeds
    /// `relevance · ‖β‖`.
    pub relevance: f64,
}

impl Default for ComponentTolerances {
    fn default() -> Self {
        Self {
            grouping: 1e-8,
            relevance: 1e-10,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EigenGroup {
    /// Mean of the grouped eigenvalues.
    pub eigenvalue: f64,
    /// Positions in the descending eigenvalue list.
    pub indices: Vec<usize>,
    /// Norm of `β`'s projection on the group's eigenspace.
    pub projection_norm: f64,
}

#[derive(Debug, Clone)]
pub struct RelevantComponents {
    /// Descending.
    pub eigenvalues: DVector<f64>,
    pub eigenvectors: DMatrix<f64>,
    /// `γᵢ = dᵢᵀβ`.
    pub gamma: DVector<f64>,
    pub groups: Vec<EigenGroup>,
    /// Indices into `groups`.
    pub relevant_groups: Vec<usize>,
}

impl RelevantComponents {
    pub fn count(&self) -> usize {
        self.relevant_groups.len()
    }

    /// `Σ γᵢdᵢ`.
    pub fn reconstruct_beta(&self) -> DVector<f64> {
        &self.eigenvectors * &self.gamma
    }
}

pub fn relevant_components(model: &PopulationRegression, tol: ComponentTolerances) -> RelevantComponents {
    let (eigenvalues, eigenvectors) = sym_eigen_desc(&model.sigma_x);
    let gamma = eigenvectors.transpose() * &model.beta;
    let gap = tol.grouping * eigenvalues[0];
    let mut groups: Vec<Vec<usize>> = Vec::new();
    for i in 0..eigenvalues.len() {
        match groups.last_mut() {
            Some(g) if eigenvalues[*g.last().unwrap()] - eigenvalues[i] <= gap => g.push(i),
            _ => groups.push(vec![i]),
        }
    }
    let beta_norm = model.beta.norm();
    let groups: Vec<EigenGroup> = groups
        .into_iter()
        .map(|indices| {
            let eigenvalue = indices.iter().map(|&i| eigenvalues[i]).sum::<f64>() / indices.len() as f64;
            let projection_norm = indices.iter().map(|&i| gamma[i] * gamma[i]).sum::<f64>().sqrt();
            EigenGroup {
                eigenvalue,
                indices,
                projection_norm,
            }
        })
        .collect();
    let relevant_groups = groups
        .iter()
        .enumerate()
        .filter(|(_, g)| beta_norm > 0.0 && g.projection_norm > tol.relevance * beta_norm)
        .map(|(i, _)| i)
        .collect();
    RelevantComponents {
        eigenvalues,
        eigenvectors,
        gamma,
        groups,
        relevant_groups,
    }
}

/// `Σ_x`-weighted projection of `β` on the first `m` Krylov directions
/// (covariance generator): `β_m = K(KᵀΣ_xK)⁻¹KᵀΣ_xβ`.
pub fn krylov_projection_beta(model: &PopulationRegression, m: usize) -> Result<DVector<f64>> {
    let krylov = krylov_space(model, KrylovGenerator::Covariance, KRYLOV_TOL)?;
    if m > krylov.dim {
        return Err(Error::out_of_range("m", m, format!("≤ Krylov dimension {}", krylov.dim)));
    }
    if m == 0 {
        return Ok(DVector::zeros(model.p()));
    }
    let k = krylov.basis.columns(0, m).into_owned();
    let sigma_k = &model.sigma_x * &k;
    let inner = symmetrize(&(k.transpose() * &sigma_k));
    let chol = inner
        .cholesky()
        .expect("KᵀΣK is positive definite for m ≤ Krylov dimension");
    let coeffs = chol.solve(&(sigma_k.transpose() * &model.beta));
    Ok(k * coeffs)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct EquivalenceReport {
    pub krylov_dim: usize,
    pub relevant_group_count: usize,
    /// `None` when the population recursion failed to stop.
    pub pls_stop: Option<usize>,
    pub agree: bool,
}

/// Compares the Krylov dimension (covariance generator, threshold `tol`), the
/// number of relevant eigenvalue groups (default tolerances) and the stop
/// index of [`population_pls`].
pub fn check_equivalence(model: &PopulationRegression, tol: f64) -> Result<EquivalenceReport> {
    let krylov_dim = krylov_space(model, KrylovGenerator::Covariance, tol)?.dim;
    let relevant_group_count = relevant_components(model, ComponentTolerances::default()).count();
    let pls_stop = population_pls(model, model.p()).ok().map(|r| r.stop);
    let agree = pls_stop == Some(krylov_dim) && krylov_dim == relevant_group_count;
    Ok(EquivalenceReport {
        krylov_dim,
        relevant_group_count,
        pls_stop,
        agree,
    })
}
