use super::{cmax_abs, projector_defect, trace_re, CMatrix, Operator, ProjectorFamily, C64, FAMILY_TOL};
use crate::{Error, Result};

/// Density operator: self-adjoint, positive semidefinite, unit trace.
#[derive(Debug, Clone, PartialEq)]
pub struct MixedState {
    rho: CMatrix,
}

impl MixedState {
    pub fn new(rho: CMatrix) -> Result<Self> {
        let d = rho.nrows();
        if d == 0 || rho.ncols() != d {
            return Err(Error::InvalidState("density matrix must be square and non-empty".into()));
        }
        let asym = cmax_abs(&(&rho - rho.adjoint()));
        if asym > FAMILY_TOL {
            return Err(Error::InvalidState(format!("not self-adjoint ({asym:.3e})")));
        }
        let trace = trace_re(&rho);
        if (trace - 1.0).abs() > FAMILY_TOL {
            return Err(Error::InvalidState(format!("trace is {trace}, expected 1")));
        }
        let rho = (&rho + rho.adjoint()) * C64::new(0.5, 0.0);
        let min_eig = rho.clone().symmetric_eigenvalues().min();
        if min_eig < -FAMILY_TOL {
            return Err(Error::InvalidState(format!("negative eigenvalue {min_eig:.3e}")));
        }
        Ok(Self { rho })
    }

    /// `|ψ⟩⟨ψ|` for a (not necessarily normalized) nonzero vector.
    pub fn pure(psi: &super::CVector) -> Result<Self> {
        let norm = psi.norm();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::InvalidState("zero or non-finite state vector".into()));
        }
        Self::new(super::outer(&(psi / C64::new(norm, 0.0))))
    }

    pub fn rho(&self) -> &CMatrix {
        &self.rho
    }

    pub fn dim(&self) -> usize {
        self.rho.nrows()
    }

    /// Eigenvalues in ascending order.
    pub fn eigenvalues(&self) -> Vec<f64> {
        let mut values: Vec<f64> = self.rho.clone().symmetric_eigenvalues().iter().copied().collect();
        values.sort_by(f64::total_cmp);
        values
    }
}

/// `ρ = Σ pᵢPᵢ`. With projectors of rank above one the trace is
/// `Σ pᵢ rank(Pᵢ)`, which is rejected rather than renormalized; see
/// [`rank_weighted_state`].
pub fn mixed_state(probs: &[f64], family: &ProjectorFamily) -> Result<MixedState> {
    check_probabilities(probs, family)?;
    let d = family.dim();
    let rho = family
        .projectors()
        .iter()
        .zip(probs)
        .fold(CMatrix::zeros(d, d), |acc, (p, &w)| acc + p * C64::new(w, 0.0));
    let trace = trace_re(&rho);
    if (trace - 1.0).abs() > FAMILY_TOL {
        return Err(Error::InvalidState(format!(
            "trace of Σ pᵢPᵢ is {trace}; projectors of rank > 1 need rank_weighted_state"
        )));
    }
    MixedState::new(rho)
}

/// `ρ = Σ (pᵢ / rank Pᵢ) Pᵢ`: probability `pᵢ` of eigenspace `i`, spread
/// uniformly inside it.
pub fn rank_weighted_state(probs: &[f64], family: &ProjectorFamily) -> Result<MixedState> {
    check_probabilities(probs, family)?;
    let d = family.dim();
    let rho = family
        .projectors()
        .iter()
        .zip(probs)
        .fold(CMatrix::zeros(d, d), |acc, (p, &w)| acc + p * C64::new(w / trace_re(p), 0.0));
    MixedState::new(rho)
}

fn check_probabilities(probs: &[f64], family: &ProjectorFamily) -> Result<()> {
    if probs.len() != family.len() {
        return Err(Error::InvalidProbabilities(format!(
            "{} probabilities for {} projectors",
            probs.len(),
            family.len()
        )));
    }
    if let Some(p) = probs.iter().find(|p| !(p.is_finite() && **p >= 0.0)) {
        return Err(Error::InvalidProbabilities(format!("{p} is not a nonnegative number")));
    }
    let sum: f64 = probs.iter().sum();
    if (sum - 1.0).abs() > 1e-12 {
        return Err(Error::InvalidProbabilities(format!("probabilities sum to {sum}")));
    }
    Ok(())
}

/// `tr(ρP)`.
pub fn born_probability(state: &MixedState, projector: &CMatrix) -> Result<f64> {
    let d = state.dim();
    if projector.shape() != (d, d) {
        return Err(Error::InvalidProjector(format!(
            "projector is {:?}, state is {d}×{d}",
            projector.shape()
        )));
    }
    let defect = projector_defect(projector);
    if defect > FAMILY_TOL {
        return Err(Error::InvalidProjector(format!(
            "not a self-adjoint idempotent (defect {defect:.3e})"
        )));
    }
    let p = trace_re(&(state.rho() * projector));
    if (-FAMILY_TOL..=1.0 + FAMILY_TOL).contains(&p) {
        Ok(p.clamp(0.0, 1.0))
    } else {
        Err(Error::InvalidState(format!("trace rule gave {p} outside [0, 1]")))
    }
}

/// Probabilities of each eigenvalue of `op`, in the order of its spectral
/// family.
pub fn measurement_distribution(state: &MixedState, op: &Operator) -> Result<Vec<f64>> {
    if state.dim() != op.dim() {
        return Err(Error::Shape(format!(
            "state dimension {} but operator dimension {}",
            state.dim(),
            op.dim()
        )));
    }
    op.spectral()
        .projectors()
        .iter()
        .map(|p| born_probability(state, p))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::super::{
        fourier_basis, function_of_variable, operator_from_values, outer, random_state,
        random_unitary, real_to_complex, CVector,
    };
    use super::*;
    use crate::rng::seeded;
    use nalgebra::DMatrix;
    use rand::Rng as _;

    fn diag(values: &[f64]) -> CMatrix {
        real_to_complex(&DMatrix::from_diagonal(&nalgebra::DVector::from_column_slice(values)))
    }

    fn standard_family(d: usize) -> ProjectorFamily {
        let projectors = (0..d)
            .map(|i| {
                let mut v = vec![0.0; d];
                v[i] = 1.0;
                diag(&v)
            })
            .collect();
        ProjectorFamily::new(projectors, (0..d).map(|i| i as f64).collect()).unwrap()
    }

    #[test]
    fn maximally_mixed_from_equal_weights() {
        let rho = mixed_state(&[0.5, 0.5], &standard_family(2)).unwrap();
        assert!(cmax_abs(&(rho.rho() - diag(&[0.5, 0.5]))) < 1e-15);
    }

    #[test]
    fn pure_state_from_indicator_weights() {
        let rho = mixed_state(&[1.0, 0.0], &standard_family(2)).unwrap();
        assert!(cmax_abs(&(rho.rho() * rho.rho() - rho.rho())) < 1e-15);
    }

    #[test]
    fn degenerate_family_trace_is_rejected() {
        let family = ProjectorFamily::new(vec![diag(&[1.0, 1.0, 0.0]), diag(&[0.0, 0.0, 1.0])], vec![0.0, 1.0]).unwrap();
        let err = mixed_state(&[0.6, 0.4], &family).unwrap_err().to_string();
        assert!(err.contains("1.6"), "{err}");
        let rho = rank_weighted_state(&[0.6, 0.4], &family).unwrap();
        assert!(cmax_abs(&(rho.rho() - diag(&[0.3, 0.3, 0.4]))) < 1e-15);
        assert!(mixed_state(&[0.7, 0.4], &family).is_err());
        assert!(mixed_state(&[1.2, -0.2], &family).is_err());
    }

    #[test]
    fn born_probabilities() {
        let mixed = MixedState::new(diag(&[1.0 / 3.0; 3])).unwrap();
        let mut rng = seeded(4);
        let u = random_unitary(3, &mut rng);
        let p = born_probability(&mixed, &outer(&u.column(1).into_owned())).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-14);

        let pure = MixedState::new(diag(&[1.0, 0.0])).unwrap();
        assert_eq!(born_probability(&pure, &diag(&[1.0, 0.0])).unwrap(), 1.0);
        assert_eq!(born_probability(&pure, &diag(&[0.0, 1.0])).unwrap(), 0.0);

        let rho = MixedState::new(diag(&[0.7, 0.3])).unwrap();
        let h = outer(&fourier_basis(2).column(0).into_owned());
        assert!((born_probability(&rho, &h).unwrap() - 0.5).abs() < 1e-15);
        assert!(born_probability(&rho, &(h * C64::new(2.0, 0.0))).is_err());
    }

    #[test]
    fn measurement_of_eigenstate_is_indicator() {
        let mut rng = seeded(9);
        let u = random_unitary(3, &mut rng);
        let op = operator_from_values(&[1.0, 2.0, 3.0], &u).unwrap();
        let state = MixedState::pure(&u.column(2).into_owned()).unwrap();
        let dist = measurement_distribution(&state, &op).unwrap();
        for (p, expected) in dist.iter().zip([0.0, 0.0, 1.0]) {
            assert!((p - expected).abs() < 1e-12);
        }
        let mixed = MixedState::new(diag(&[1.0 / 3.0; 3])).unwrap();
        for p in measurement_distribution(&mixed, &op).unwrap() {
            assert!((p - 1.0 / 3.0).abs() < 1e-12);
        }
    }

    #[test]
    fn measurement_matches_eigendecomposition_oracle() {
        let mut rng = seeded(31);
        for _ in 0..50 {
            let d = rng.random_range(1..=4);
            let state = random_state(d, rng.random_range(1..=d), &mut rng);
            let values: Vec<f64> = (0..d).map(|i| i as f64 + rng.random::<f64>() * 0.5).collect();
            let u = random_unitary(d, &mut rng);
            let op = operator_from_values(&values, &u).unwrap();
            let dist = measurement_distribution(&state, &op).unwrap();
            // Σₖ λₖ |⟨φₖ|ψⱼ⟩|² with (λₖ, φₖ) the eigenpairs of ρ.
            let eig = state.rho().clone().symmetric_eigen();
            for (j, p) in dist.iter().enumerate() {
                let psi: CVector = u.column(j).into_owned();
                let oracle: f64 = (0..d)
                    .map(|k| eig.eigenvalues[k] * eig.eigenvectors.column(k).dotc(&psi).norm_sqr())
                    .sum();
                assert!((p - oracle).abs() < 1e-12);
            }
            assert!((dist.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
    }

    #[test]
    fn rank_one_mixture_has_weights_as_eigenvalues() {
        let mut rng = seeded(12);
        let u = random_unitary(4, &mut rng);
        let op = operator_from_values(&[1.0, 2.0, 3.0, 4.0], &u).unwrap();
        let probs = [0.1, 0.4, 0.2, 0.3];
        let rho = mixed_state(&probs, op.spectral()).unwrap();
        let mut sorted = probs.to_vec();
        sorted.sort_by(f64::total_cmp);
        for (a, b) in rho.eigenvalues().iter().zip(sorted) {
            assert!((a - b).abs() < 1e-10);
        }
        let coarse = function_of_variable(&op, |x| (x > 2.5) as u8 as f64).unwrap();
        assert_eq!(measurement_distribution(&rho, &coarse).unwrap().len(), 2);
    }

    #[test]
    fn state_validation() {
        assert!(MixedState::new(diag(&[0.6, 0.6])).is_err());
        assert!(MixedState::new(diag(&[1.2, -0.2])).is_err());
        let mut skew = diag(&[0.5, 0.5]);
        skew[(0, 1)] = C64::new(0.1, 0.0);
        assert!(MixedState::new(skew).is_err());
    }
}
