//! Small dense linear-algebra helpers shared across modules.

use nalgebra::{DMatrix, DVector};
use rand::Rng as _;
use rand_distr::StandardNormal;

use crate::rng::Rng;

/// `(C + Cᵀ) / 2`.
pub fn symmetrize(m: &DMatrix<f64>) -> DMatrix<f64> {
    (m + m.transpose()) * 0.5
}

pub fn max_abs(m: &DMatrix<f64>) -> f64 {
    m.iter().fold(0.0_f64, |acc, v| acc.max(v.abs()))
}

pub fn max_abs_vec(v: &DVector<f64>) -> f64 {
    v.iter().fold(0.0_f64, |acc, x| acc.max(x.abs()))
}

/// Largest absolute deviation from symmetry.
pub fn asymmetry(m: &DMatrix<f64>) -> f64 {
    max_abs(&(m - m.transpose()))
}

/// Eigen-decomposition of a symmetric matrix with eigenvalues sorted in
/// descending order; the columns of the returned matrix follow that order.
pub fn sym_eigen_desc(m: &DMatrix<f64>) -> (DVector<f64>, DMatrix<f64>) {
    let n = m.nrows();
    let eig = symmetrize(m).symmetric_eigen();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = DVector::from_iterator(n, order.iter().map(|&i| eig.eigenvalues[i]));
    let mut vectors = DMatrix::zeros(n, n);
    for (dst, &src) in order.iter().enumerate() {
        vectors.set_column(dst, &eig.eigenvectors.column(src));
    }
    (values, vectors)
}

/// Deviation of `QᵀQ` from the identity, max-abs.
pub fn orthonormality_defect(q: &DMatrix<f64>) -> f64 {
    let k = q.ncols();
    max_abs(&(q.transpose() * q - DMatrix::identity(k, k)))
}

/// An orthonormal basis of the orthogonal complement of `span(phi)`, for
/// `phi` with orthonormal columns. Taken from the eigenvectors of `I − ΦΦᵀ`
/// with eigenvalue one.
pub fn orthonormal_completion(phi: &DMatrix<f64>) -> DMatrix<f64> {
    let p = phi.nrows();
    let m = phi.ncols();
    if m >= p {
        return DMatrix::zeros(p, 0);
    }
    let residual = DMatrix::identity(p, p) - phi * phi.transpose();
    let (_, vectors) = sym_eigen_desc(&residual);
    vectors.columns(0, p - m).into_owned()
}

/// Is `m` symmetric positive definite (Cholesky succeeds after a symmetry
/// check at `1e-10` relative)?
pub fn is_spd(m: &DMatrix<f64>) -> bool {
    if m.nrows() != m.ncols() {
        return false;
    }
    if m.nrows() == 0 {
        return true;
    }
    let scale = max_abs(m).max(f64::MIN_POSITIVE);
    if asymmetry(m) > 1e-10 * scale {
        return false;
    }
    symmetrize(m).cholesky().is_some()
}

pub fn standard_normal_matrix(rows: usize, cols: usize, rng: &mut Rng) -> DMatrix<f64> {
    DMatrix::from_fn(rows, cols, |_, _| rng.sample(StandardNormal))
}

/// Haar-distributed orthogonal matrix (QR of a Gaussian matrix with the
/// sign of `R`'s diagonal folded into `Q`).
pub fn random_orthogonal(p: usize, rng: &mut Rng) -> DMatrix<f64> {
    let g = standard_normal_matrix(p, p, rng);
    let qr = g.qr();
    let mut q = qr.q();
    let r = qr.r();
    for j in 0..p {
        if r[(j, j)] < 0.0 {
            q.column_mut(j).neg_mut();
        }
    }
    q
}

/// Sine of the largest principal angle between `span(a)` and `span(b)`,
/// both given by orthonormal columns of equal count.
pub fn max_principal_angle_sin(a: &DMatrix<f64>, b: &DMatrix<f64>) -> f64 {
    if a.ncols() == 0 && b.ncols() == 0 {
        return 0.0;
    }
    let p = a.nrows();
    let residual = (DMatrix::identity(p, p) - b * b.transpose()) * a;
    residual
        .singular_values()
        .iter()
        .fold(0.0_f64, |acc, &s| acc.max(s))
}
