//! Finite-dimensional operator calculus for conceptual variables.
//!
//! A variable taking `d` distinct values is represented by a self-adjoint
//! operator on `ℂᵈ` whose eigenvalues are those values. Coarser variables
//! `θ = f(λ)` merge eigenspaces; a variable is maximal when all of its
//! eigenspaces are one-dimensional. States are density operators and
//! probabilities follow the trace rule `p = tr(ρP)`.

mod decision;
mod state;

pub use decision::{decision_variable, qdt_probabilities, ConceptualVariable, Prospect};
pub use state::{
    born_probability, measurement_distribution, mixed_state, rank_weighted_state, MixedState,
};

use nalgebra::{Complex, DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::rng::Rng;
use crate::{Error, Result};

pub type C64 = Complex<f64>;
pub type CMatrix = DMatrix<C64>;
pub type CVector = DVector<C64>;

/// Tolerance for projector-family and self-adjointness checks.
pub const FAMILY_TOL: f64 = 1e-10;

/// Eigenvalues closer than this multiple of the spectral radius are one
/// eigenvalue.
pub const DEGENERACY_TOL: f64 = 1e-8;

/// Largest entry modulus.
pub fn cmax_abs(m: &CMatrix) -> f64 {
    m.iter().fold(0.0_f64, |acc, z| acc.max(z.norm()))
}

pub fn trace_re(m: &CMatrix) -> f64 {
    m.diagonal().iter().map(|z| z.re).sum()
}

/// `|v⟩⟨v|`.
pub fn outer(v: &CVector) -> CMatrix {
    v * v.adjoint()
}

pub fn real_to_complex(m: &DMatrix<f64>) -> CMatrix {
    m.map(|x| C64::new(x, 0.0))
}

fn identity(d: usize) -> CMatrix {
    CMatrix::identity(d, d)
}

/// Defect of `P` as an orthogonal projector: max of `‖P² − P‖` and
/// `‖P − P†‖`, entrywise.
pub fn projector_defect(p: &CMatrix) -> f64 {
    cmax_abs(&(p * p - p)).max(cmax_abs(&(p - p.adjoint())))
}

/// Mutually orthogonal projectors summing to the identity, each labelled
/// with a value.
#[derive(Debug, Clone, PartialEq)]
pub struct ProjectorFamily {
    dim: usize,
    projectors: Vec<CMatrix>,
    values: Vec<f64>,
}

impl ProjectorFamily {
    pub fn new(projectors: Vec<CMatrix>, values: Vec<f64>) -> Result<Self> {
        let family = Self {
            dim: projectors.first().map_or(0, |p| p.nrows()),
            projectors,
            values,
        };
        family.validate()?;
        Ok(family)
    }

    fn validate(&self) -> Result<()> {
        let d = self.dim;
        if self.projectors.is_empty() || d == 0 {
            return Err(Error::InvalidProjector("empty family".into()));
        }
        if self.values.len() != self.projectors.len() {
            return Err(Error::InvalidProjector(format!(
                "{} projectors but {} values",
                self.projectors.len(),
                self.values.len()
            )));
        }
        if self.values.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidProjector("non-finite value label".into()));
        }
        for (i, p) in self.projectors.iter().enumerate() {
            if p.shape() != (d, d) {
                return Err(Error::InvalidProjector(format!("projector {i} is not {d}×{d}")));
            }
            let defect = projector_defect(p);
            if defect > FAMILY_TOL {
                return Err(Error::InvalidProjector(format!(
                    "projector {i} is not a self-adjoint idempotent (defect {defect:.3e})"
                )));
            }
        }
        for i in 0..self.projectors.len() {
            for j in 0..i {
                let overlap = cmax_abs(&(&self.projectors[i] * &self.projectors[j]));
                if overlap > FAMILY_TOL {
                    return Err(Error::InvalidProjector(format!(
                        "projectors {j} and {i} are not orthogonal ({overlap:.3e})"
                    )));
                }
            }
        }
        let sum = self.projectors.iter().fold(CMatrix::zeros(d, d), |acc, p| acc + p);
        let incompleteness = cmax_abs(&(sum - identity(d)));
        if incompleteness > FAMILY_TOL {
            return Err(Error::InvalidProjector(format!(
                "projectors do not sum to the identity ({incompleteness:.3e})"
            )));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn len(&self) -> usize {
        self.projectors.len()
    }

    pub fn is_empty(&self) -> bool {
        self.projectors.is_empty()
    }

    pub fn projectors(&self) -> &[CMatrix] {
        &self.projectors
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    /// Ranks, read off as traces.
    pub fn ranks(&self) -> Vec<usize> {
        self.projectors.iter().map(|p| trace_re(p).round() as usize).collect()
    }

    /// `Σ vᵢPᵢ`.
    pub fn operator_matrix(&self) -> CMatrix {
        self.projectors
            .iter()
            .zip(&self.values)
            .fold(CMatrix::zeros(self.dim, self.dim), |acc, (p, &v)| acc + p * C64::new(v, 0.0))
    }
}

/// A self-adjoint operator together with its spectral family.
#[derive(Debug, Clone, PartialEq)]
pub struct Operator {
    matrix: CMatrix,
    spectral: ProjectorFamily,
}

impl Operator {
    pub fn from_spectral(spectral: ProjectorFamily) -> Self {
        Self {
            matrix: spectral.operator_matrix(),
            spectral,
        }
    }

    /// Spectral decomposition of a self-adjoint matrix, with eigenvalues
    /// closer than [`DEGENERACY_TOL`] times the spectral radius merged.
    pub fn from_matrix(matrix: CMatrix) -> Result<Self> {
        let d = matrix.nrows();
        if d == 0 || matrix.ncols() != d {
            return Err(Error::InvalidOperator("matrix must be square and non-empty".into()));
        }
        let scale = cmax_abs(&matrix).max(1.0);
        if cmax_abs(&(&matrix - matrix.adjoint())) > FAMILY_TOL * scale {
            return Err(Error::InvalidOperator("matrix is not self-adjoint".into()));
        }
        let hermitian = (&matrix + matrix.adjoint()) * C64::new(0.5, 0.0);
        let eig = hermitian.clone().symmetric_eigen();
        let mut order: Vec<usize> = (0..d).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
        let radius = eig.eigenvalues.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
        let gap = DEGENERACY_TOL * radius;
        let mut groups: Vec<(Vec<f64>, CMatrix)> = Vec::new();
        for &i in &order {
            let value = eig.eigenvalues[i];
            let v = eig.eigenvectors.column(i).into_owned();
            match groups.last_mut() {
                Some((vals, p)) if value - vals.last().unwrap() <= gap => {
                    vals.push(value);
                    *p += outer(&v);
                }
                _ => groups.push((vec![value], outer(&v))),
            }
        }
        let values = groups.iter().map(|(v, _)| v.iter().sum::<f64>() / v.len() as f64).collect();
        let projectors = groups.into_iter().map(|(_, p)| p).collect();
        let spectral = ProjectorFamily::new(projectors, values)?;
        Ok(Self {
            matrix: hermitian,
            spectral,
        })
    }

    pub fn matrix(&self) -> &CMatrix {
        &self.matrix
    }

    pub fn spectral(&self) -> &ProjectorFamily {
        &self.spectral
    }

    pub fn dim(&self) -> usize {
        self.spectral.dim
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.spectral.values
    }
}

/// `A = Σ uᵢ|ψᵢ⟩⟨ψᵢ|` with `|ψᵢ⟩` the columns of `basis`.
pub fn operator_from_values(values: &[f64], basis: &CMatrix) -> Result<Operator> {
    let d = values.len();
    if d == 0 {
        return Err(Error::InvalidOperator("no values".into()));
    }
    if basis.shape() != (d, d) {
        return Err(Error::Shape(format!("{d} values but basis is {:?}", basis.shape())));
    }
    check_distinct(values)?;
    let defect = cmax_abs(&(basis.adjoint() * basis - identity(d)));
    if defect > FAMILY_TOL {
        return Err(Error::InvalidOperator(format!("non-unitary basis (defect {defect:.3e})")));
    }
    let projectors = (0..d).map(|i| outer(&basis.column(i).into_owned())).collect();
    Ok(Operator::from_spectral(ProjectorFamily::new(projectors, values.to_vec())?))
}

pub(crate) fn check_distinct(values: &[f64]) -> Result<()> {
    if values.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidOperator("non-finite value".into()));
    }
    let scale = values.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    for i in 0..values.len() {
        for j in 0..i {
            if (values[i] - values[j]).abs() <= 1e-12 * scale {
                return Err(Error::InvalidOperator(format!(
                    "values {} and {} coincide",
                    values[j], values[i]
                )));
            }
        }
    }
    Ok(())
}

/// Operator of `θ = f(λ)`: eigenvalues become `f(vᵢ)` and projectors whose
/// images coincide (within [`DEGENERACY_TOL`] of the new spectral radius)
/// are summed. The result is ordered by ascending value.
pub fn function_of_variable(op: &Operator, f: impl Fn(f64) -> f64) -> Result<Operator> {
    let images: Vec<f64> = op.spectral.values.iter().map(|&v| f(v)).collect();
    if let Some(v) = images.iter().find(|v| !v.is_finite()) {
        return Err(Error::InvalidOperator(format!("function produced non-finite value {v}")));
    }
    let radius = images.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()));
    let gap = DEGENERACY_TOL * radius;
    let mut order: Vec<usize> = (0..images.len()).collect();
    order.sort_by(|&a, &b| images[a].total_cmp(&images[b]));
    let mut merged: Vec<(f64, CMatrix)> = Vec::new();
    for i in order {
        let p = &op.spectral.projectors[i];
        match merged.last_mut() {
            Some((value, acc)) if (images[i] - *value).abs() <= gap => *acc += p,
            _ => merged.push((images[i], p.clone())),
        }
    }
    let (values, projectors): (Vec<f64>, Vec<CMatrix>) = merged.into_iter().unzip();
    Ok(Operator::from_spectral(ProjectorFamily::new(projectors, values)?))
}

/// True iff every eigenspace is one-dimensional.
pub fn is_maximal(op: &Operator) -> bool {
    op.spectral
        .projectors
        .iter()
        .all(|p| (trace_re(p) - 1.0).abs() <= 1e-8)
}

/// `θ ≤ λ`: every eigenprojector of `lambda` lies inside a single eigenspace
/// of `theta`, i.e. `theta` is a function of `lambda`.
pub fn leq(theta: &Operator, lambda: &Operator, tol: f64) -> bool {
    if theta.dim() != lambda.dim() {
        return false;
    }
    lambda.spectral.projectors.iter().all(|pl| {
        theta
            .spectral
            .projectors
            .iter()
            .any(|pt| cmax_abs(&(pt * pl - pl)) <= tol)
    })
}

/// Eigenprojector for the sharp answer `θ = value`.
pub fn question_answer_state(op: &Operator, value: f64) -> Result<CMatrix> {
    op.spectral
        .values
        .iter()
        .position(|v| (v - value).abs() <= 1e-9)
        .map(|i| op.spectral.projectors[i].clone())
        .ok_or(Error::NotAnEigenvalue { value })
}

/// A maximal refinement `λ` of an operator and the grouping map `f` with
/// `θ = f(λ)`.
#[derive(Debug, Clone)]
pub struct Refinement {
    /// Eigenvalues `1, ..., d`, all rank one.
    pub lambda: Operator,
    /// `grouping[k]` is the value of the original variable when `λ = k + 1`.
    pub grouping: Vec<f64>,
}

impl Refinement {
    /// `f(λ)`; values of `λ` are rounded to the nearest label.
    pub fn map(&self, lambda_value: f64) -> f64 {
        let k = (lambda_value.round() as usize).clamp(1, self.grouping.len());
        self.grouping[k - 1]
    }
}

/// Splits each eigenspace of `op` along an orthonormal basis of its own and
/// labels the resulting rank-one projectors `1, ..., d`.
pub fn maximal_refinement(op: &Operator) -> Result<Refinement> {
    let d = op.dim();
    let mut columns: Vec<CVector> = Vec::with_capacity(d);
    let mut grouping = Vec::with_capacity(d);
    for (p, &value) in op.spectral.projectors.iter().zip(&op.spectral.values) {
        let eig = p.clone().symmetric_eigen();
        for (i, &ev) in eig.eigenvalues.iter().enumerate() {
            if ev > 0.5 {
                columns.push(eig.eigenvectors.column(i).into_owned());
                grouping.push(value);
            }
        }
    }
    if columns.len() != d {
        return Err(Error::InvalidOperator(format!(
            "eigenspaces have total dimension {} instead of {d}",
            columns.len()
        )));
    }
    let basis = CMatrix::from_columns(&columns);
    let labels: Vec<f64> = (1..=d).map(|k| k as f64).collect();
    Ok(Refinement {
        lambda: operator_from_values(&labels, &basis)?,
        grouping,
    })
}

/// Haar-random unitary (QR of a complex Gaussian matrix, phases of `R`'s
/// diagonal folded into `Q`).
pub fn random_unitary(d: usize, rng: &mut Rng) -> CMatrix {
    let g = CMatrix::from_fn(d, d, |_, _| C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal)));
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..d {
        let diag = r[(j, j)];
        let n = diag.norm();
        if n > 0.0 {
            let phase = diag / C64::new(n, 0.0);
            for i in 0..d {
                q[(i, j)] *= phase;
            }
        }
    }
    q
}

/// Random density operator `GG† / tr(GG†)` with `G` complex Gaussian of
/// size `d × rank`.
pub fn random_state(d: usize, rank: usize, rng: &mut Rng) -> MixedState {
    let g = CMatrix::from_fn(d, rank.max(1), |_, _| {
        C64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let rho = &g * g.adjoint();
    let tr = trace_re(&rho);
    MixedState::new(rho / C64::new(tr, 0.0)).expect("GG†/tr is a density operator")
}

/// Discrete Fourier basis; for `d = 2` this is the Hadamard basis.
pub fn fourier_basis(d: usize) -> CMatrix {
    let norm = 1.0 / (d as f64).sqrt();
    CMatrix::from_fn(d, d, |j, k| {
        let angle = 2.0 * std::f64::consts::PI * (j * k) as f64 / d as f64;
        C64::from_polar(norm, angle)
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::seeded;

    fn c(re: f64) -> C64 {
        C64::new(re, 0.0)
    }

    fn real(rows: usize, v: &[f64]) -> CMatrix {
        real_to_complex(&DMatrix::from_row_slice(rows, rows, v))
    }

    fn diag_op(values: &[f64]) -> Operator {
        operator_from_values(values, &identity(values.len())).unwrap()
    }

    fn hadamard_op() -> Operator {
        operator_from_values(&[1.0, -1.0], &fourier_basis(2)).unwrap()
    }

    #[test]
    fn diagonal_construction() {
        assert!(cmax_abs(&(diag_op(&[1.0, -1.0]).matrix() - real(2, &[1.0, 0.0, 0.0, -1.0]))) < 1e-15);
    }

    #[test]
    fn hadamard_construction_is_off_diagonal() {
        let a = hadamard_op();
        assert!(cmax_abs(&(a.matrix() - real(2, &[0.0, 1.0, 1.0, 0.0]))) < 1e-15);
    }

    #[test]
    fn eigenvalues_recovered_by_independent_solver() {
        let mut rng = seeded(8);
        let values = [-1.5, 0.25, 2.0, 3.5];
        let op = operator_from_values(&values, &random_unitary(4, &mut rng)).unwrap();
        let mut eig: Vec<f64> = op.matrix().clone().symmetric_eigen().eigenvalues.iter().copied().collect();
        eig.sort_by(f64::total_cmp);
        for (a, b) in eig.iter().zip(values) {
            assert!((a - b).abs() < 1e-9);
        }
    }

    #[test]
    fn rejects_non_unitary_basis_and_repeated_values() {
        let skewed = real(2, &[1.0, 0.1, 0.0, 1.0]);
        assert!(operator_from_values(&[1.0, 2.0], &skewed).is_err());
        assert!(operator_from_values(&[1.0, 1.0], &identity(2)).is_err());
    }

    #[test]
    fn identity_function_keeps_operator() {
        let mut rng = seeded(2);
        let op = operator_from_values(&[1.0, 2.0, 3.0], &random_unitary(3, &mut rng)).unwrap();
        let same = function_of_variable(&op, |x| x).unwrap();
        assert!(cmax_abs(&(same.matrix() - op.matrix())) < 1e-10);
        assert!(is_maximal(&same));
    }

    #[test]
    fn constant_function_gives_scaled_identity() {
        let op = diag_op(&[1.0, 2.0, 3.0]);
        let constant = function_of_variable(&op, |_| 2.5).unwrap();
        assert_eq!(constant.spectral().len(), 1);
        assert!(cmax_abs(&(&constant.spectral().projectors()[0] - identity(3))) < 1e-15);
        assert!(cmax_abs(&(constant.matrix() - identity(3) * c(2.5))) < 1e-15);
    }

    #[test]
    fn parity_grouping() {
        let op = diag_op(&[1.0, 2.0, 3.0]);
        let parity = function_of_variable(&op, |x| (x as i64 % 2) as f64).unwrap();
        assert_eq!(parity.eigenvalues(), &[0.0, 1.0]);
        assert_eq!(parity.spectral().ranks(), vec![1, 2]);
        let p_odd = real(3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
        assert!(cmax_abs(&(parity.matrix() - p_odd)) < 1e-15);
        assert!(!is_maximal(&parity));
        assert!(function_of_variable(&op, |x| 1.0 / (x - 2.0)).is_err());
    }

    #[test]
    fn maximality() {
        assert!(is_maximal(&diag_op(&[1.0, 2.0, 3.0])));
        assert!(is_maximal(&diag_op(&[7.0])));
    }

    #[test]
    fn partial_order() {
        let lambda = diag_op(&[1.0, 2.0, 3.0]);
        let theta = function_of_variable(&lambda, |x| (x - 2.0).abs()).unwrap();
        assert!(leq(&theta, &lambda, 1e-9));
        assert!(!leq(&lambda, &theta, 1e-9));
        assert!(leq(&lambda, &lambda, 1e-9));
        assert!(!leq(&diag_op(&[1.0, -1.0]), &hadamard_op(), 1e-9));
        assert!(!leq(&hadamard_op(), &diag_op(&[1.0, -1.0]), 1e-9));
    }

    #[test]
    fn question_answer_projectors() {
        let p = question_answer_state(&diag_op(&[1.0, -1.0]), 1.0).unwrap();
        assert!(cmax_abs(&(p - real(2, &[1.0, 0.0, 0.0, 0.0]))) < 1e-15);
        let p = question_answer_state(&hadamard_op(), 1.0).unwrap();
        assert!(cmax_abs(&(p - real(2, &[0.5, 0.5, 0.5, 0.5]))) < 1e-15);
        let err = question_answer_state(&hadamard_op(), 0.5).unwrap_err();
        assert_eq!(err.to_string(), "0.5 is not an eigenvalue");
    }

    #[test]
    fn refinement_reproduces_operator() {
        let mut rng = seeded(5);
        let base = operator_from_values(&[1.0, 2.0, 3.0], &random_unitary(3, &mut rng)).unwrap();
        let parity = function_of_variable(&base, |x| (x as i64 % 2) as f64).unwrap();
        for op in [base, parity, function_of_variable(&diag_op(&[1.0, 2.0]), |_| 4.0).unwrap()] {
            let refinement = maximal_refinement(&op).unwrap();
            assert!(is_maximal(&refinement.lambda));
            assert_eq!(refinement.lambda.dim(), op.dim());
            let back = function_of_variable(&refinement.lambda, |x| refinement.map(x)).unwrap();
            assert!(cmax_abs(&(back.matrix() - op.matrix())) < 1e-9);
            assert!(leq(&op, &refinement.lambda, 1e-9));
        }
    }

    #[test]
    fn from_matrix_groups_degenerate_eigenvalues() {
        let op = Operator::from_matrix(real(3, &[2.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 5.0])).unwrap();
        assert_eq!(op.eigenvalues().len(), 2);
        assert_eq!(op.spectral().ranks(), vec![2, 1]);
        assert!(Operator::from_matrix(real(2, &[0.0, 1.0, 0.0, 0.0])).is_err());
    }

    #[test]
    fn family_validation() {
        let p0 = real(2, &[1.0, 0.0, 0.0, 0.0]);
        let p1 = real(2, &[0.0, 0.0, 0.0, 1.0]);
        assert!(ProjectorFamily::new(vec![p0.clone(), p1.clone()], vec![0.0, 1.0]).is_ok());
        assert!(ProjectorFamily::new(vec![p0.clone()], vec![0.0]).is_err());
        assert!(ProjectorFamily::new(vec![p0.clone(), p0.clone()], vec![0.0, 1.0]).is_err());
        assert!(ProjectorFamily::new(vec![p0.clone() * c(2.0), p1.clone()], vec![0.0, 1.0]).is_err());
        assert!(ProjectorFamily::new(vec![p0, p1], vec![0.0]).is_err());
    }

    #[test]
    fn random_unitary_is_unitary() {
        let mut rng = seeded(1);
        let u = random_unitary(5, &mut rng);
        assert!(cmax_abs(&(u.adjoint() * &u - identity(5))) < 1e-12);
    }
}
