//! Figures of merit and optimality certification for minimum-error
//! discrimination.
//!
//! For an ensemble `{p_j, ρ_j}` and POVM `{π_j}`, the measurement is optimal
//! iff the Helstrom conditions hold:
//!
//! 1. `Γ - p_j ρ_j ⪰ 0` for every j, where `Γ = Σ_i p_i ρ_i π_i`;
//! 2. `π_i (p_i ρ_i - p_j ρ_j) π_j = 0` for every pair i ≠ j;
//! 3. equivalently `(Γ - p_j ρ_j) π_j = 0` for every j.
//!
//! The two-state trace-norm bound `(1 + ‖p_0 ρ_0 - p_1 ρ_1‖_1)/2` provides an
//! independent oracle for binary problems.

use serde::{Deserialize, Serialize};

use crate::matrix::ComplexMatrix;
use crate::model::{trace_product, DensityOperator, Ensemble, Povm};
use crate::{Error, Result};

/// Average success probability `Σ_m p_{g(m)} Tr(ρ_{g(m)} π_m)` for a guess
/// map from outcomes to states, clamped to [0, 1].
pub fn success_probability(ensemble: &Ensemble, povm: &Povm, guess: &[usize]) -> Result<f64> {
    if guess.len() != povm.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} guesses for {} outcomes",
            guess.len(),
            povm.len()
        )));
    }
    if povm.dim() != ensemble.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM dim {} on ensemble dim {}",
            povm.dim(),
            ensemble.dim()
        )));
    }
    if let Some(&g) = guess.iter().find(|&&g| g >= ensemble.len()) {
        return Err(Error::InvalidEnsemble(format!(
            "guess index {g} out of range for {} states",
            ensemble.len()
        )));
    }
    let mut total = 0.0;
    for (m, &g) in guess.iter().enumerate() {
        total += trace_product(&ensemble.weighted_state(g), &povm.effects()[m]);
    }
    Ok(total.clamp(0.0, 1.0))
}

/// Identity guess map `outcome m → state m`.
pub fn identity_guess(n: usize) -> Vec<usize> {
    (0..n).collect()
}

/// Subset-identification success probability
/// `(8/3) Σ_k (1/8) Tr(σ_k π_k)` for the eight domino subset states.
pub fn subset_success_probability(sigma_ops: &[ComplexMatrix], povm: &Povm) -> Result<f64> {
    if sigma_ops.len() != 8 || povm.len() != 8 {
        return Err(Error::DimensionMismatch(format!(
            "expected 8 subset states and 8 effects, got {} and {}",
            sigma_ops.len(),
            povm.len()
        )));
    }
    if sigma_ops.iter().any(|s| s.rows() != 3) || povm.dim() != 3 {
        return Err(Error::DimensionMismatch("subset problem lives in dimension 3".into()));
    }
    let sum: f64 = sigma_ops
        .iter()
        .zip(povm.effects())
        .map(|(s, e)| trace_product(s, e) / 8.0)
        .sum();
    Ok(sum * 8.0 / 3.0)
}

/// The Lagrangian operator `Γ = Σ_i p_i ρ_i π_i` with its anti-Hermitian
/// residual (Γ is Hermitian at an optimum, so the residual is a useful
/// diagnostic rather than an enforced property).
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GammaOperator {
    pub matrix: ComplexMatrix,
    pub anti_hermitian_residual: f64,
}

pub fn gamma_operator(ensemble: &Ensemble, povm: &Povm) -> Result<GammaOperator> {
    if povm.dim() != ensemble.dim() {
        return Err(Error::DimensionMismatch(format!(
            "POVM dim {} on ensemble dim {}",
            povm.dim(),
            ensemble.dim()
        )));
    }
    if povm.len() < ensemble.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} effects for {} states",
            povm.len(),
            ensemble.len()
        )));
    }
    let dim = ensemble.dim();
    let mut gamma = ComplexMatrix::zeros(dim, dim);
    for j in 0..ensemble.len() {
        gamma = gamma.add(&ensemble.weighted_state(j).matmul(&povm.effects()[j]));
    }
    let anti_hermitian_residual = gamma.hermitian_residual();
    Ok(GammaOperator { matrix: gamma, anti_hermitian_residual })
}

/// Outcome of checking the Helstrom conditions at a given tolerance.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct HelstromReport {
    pub gamma: ComplexMatrix,
    pub gamma_anti_hermitian_residual: f64,
    /// Smallest eigenvalue of `Γ - p_j ρ_j`, per state.
    pub min_eigenvalues: Vec<f64>,
    /// Largest `‖(Γ - p_j ρ_j) π_j‖_F` over outcomes.
    pub max_lagrange_residual: f64,
    /// Largest `‖π_i (p_i ρ_i - p_j ρ_j) π_j‖_F` over ordered pairs i ≠ j.
    pub max_pairwise_residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Evaluates all three Helstrom conditions; `pass` requires every minimum
/// eigenvalue `≥ -tol` and every residual (including Γ's anti-Hermitian part)
/// `≤ tol`. The POVM's effect count must equal the state count, with effect j
/// deciding for state j.
pub fn check_helstrom_conditions(
    ensemble: &Ensemble,
    povm: &Povm,
    tolerance: f64,
) -> Result<HelstromReport> {
    if povm.len() != ensemble.len() {
        return Err(Error::DimensionMismatch(format!(
            "{} effects for {} states",
            povm.len(),
            ensemble.len()
        )));
    }
    let gamma = gamma_operator(ensemble, povm)?;
    let gamma_h = gamma.matrix.symmetrized();

    let weighted: Vec<ComplexMatrix> = (0..ensemble.len())
        .map(|j| ensemble.weighted_state(j))
        .collect();

    let mut min_eigenvalues = Vec::with_capacity(ensemble.len());
    let mut max_lagrange_residual: f64 = 0.0;
    for (w, effect) in weighted.iter().zip(povm.effects()) {
        let slack = gamma_h.sub(w);
        min_eigenvalues.push(slack.eig_hermitian()?.eigenvalues[0]);
        max_lagrange_residual =
            max_lagrange_residual.max(gamma.matrix.sub(w).matmul(effect).frobenius_norm());
    }

    let mut max_pairwise_residual: f64 = 0.0;
    for (i, wi) in weighted.iter().enumerate() {
        for (j, wj) in weighted.iter().enumerate() {
            if i == j {
                continue;
            }
            let r = povm.effects()[i]
                .matmul(&wi.sub(wj))
                .matmul(&povm.effects()[j])
                .frobenius_norm();
            max_pairwise_residual = max_pairwise_residual.max(r);
        }
    }

    let pass = min_eigenvalues.iter().all(|&x| x >= -tolerance)
        && max_lagrange_residual <= tolerance
        && max_pairwise_residual <= tolerance
        && gamma.anti_hermitian_residual <= tolerance;
    Ok(HelstromReport {
        gamma: gamma.matrix,
        gamma_anti_hermitian_residual: gamma.anti_hermitian_residual,
        min_eigenvalues,
        max_lagrange_residual,
        max_pairwise_residual,
        tolerance,
        pass,
    })
}

/// Optimal success probability for discriminating two states with priors
/// `(p0, 1-p0)`: `(1 + ‖p_0 ρ_0 - p_1 ρ_1‖_1)/2`.
pub fn helstrom_two_state_bound(
    rho0: &DensityOperator,
    rho1: &DensityOperator,
    p0: f64,
) -> Result<f64> {
    if rho0.dim() != rho1.dim() {
        return Err(Error::DimensionMismatch(format!(
            "states of dim {} and {}",
            rho0.dim(),
            rho1.dim()
        )));
    }
    if !(0.0..=1.0).contains(&p0) {
        return Err(Error::InvalidEnsemble(format!("prior {p0} outside [0,1]")));
    }
    let diff = rho0.matrix().scale_re(p0).sub(&rho1.matrix().scale_re(1.0 - p0));
    let trace_norm: f64 = diff.eig_hermitian()?.eigenvalues.iter().map(|x| x.abs()).sum();
    Ok(0.5 * (1.0 + trace_norm))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::{breidbart_basis, sigma_operators, tau_ensemble};
    use crate::matrix::tol;
    use crate::model::{Ensemble, EnsembleState, Ket};

    fn tau_states() -> (DensityOperator, DensityOperator) {
        let e = tau_ensemble();
        let to_density = |s: &EnsembleState| match s {
            EnsembleState::Mixed(d) => d.clone(),
            EnsembleState::Pure(k) => DensityOperator::from_ket(k),
        };
        (to_density(&e.states()[0]), to_density(&e.states()[1]))
    }

    fn breidbart_povm() -> Povm {
        let (phi0, phi1) = breidbart_basis();
        Povm::from_basis(&[phi0, phi1]).unwrap()
    }

    const COS2_PI8: f64 = 0.8535533905932737;

    #[test]
    fn own_basis_measurement_succeeds_perfectly() {
        let states: Vec<EnsembleState> =
            (0..3).map(|i| EnsembleState::Pure(Ket::basis(3, i))).collect();
        let ens = Ensemble::equiprobable(vec![3], states).unwrap();
        let povm = Povm::from_basis(&[Ket::basis(3, 0), Ket::basis(3, 1), Ket::basis(3, 2)]).unwrap();
        let p = success_probability(&ens, &povm, &identity_guess(3)).unwrap();
        assert!((p - 1.0).abs() < 1e-15);
        let report = check_helstrom_conditions(&ens, &povm, 1e-10).unwrap();
        assert!(report.pass);
        assert!(report.max_lagrange_residual < 1e-15);
        assert!(report.max_pairwise_residual < 1e-15);
    }

    #[test]
    fn tau_breidbart_success() {
        let ens = tau_ensemble();
        let p = success_probability(&ens, &breidbart_povm(), &[0, 1]).unwrap();
        assert!((p - COS2_PI8).abs() < 1e-14, "got {p}");
    }

    #[test]
    fn gamma_of_single_state_identity_povm_is_the_state() {
        let tau = tau_ensemble();
        let rho = tau.states()[0].density_matrix();
        let single = Ensemble::new(
            vec![2],
            vec![EnsembleState::Mixed(DensityOperator::from_matrix(rho.clone()).unwrap())],
            vec![1.0],
            vec!["only".into()],
        )
        .unwrap();
        let identity = Povm::new(vec![ComplexMatrix::identity(2)]).unwrap();
        let g = gamma_operator(&single, &identity).unwrap();
        assert!(g.matrix.sub(&rho).frobenius_norm() < 1e-15);
    }

    #[test]
    fn tau_gamma_trace_equals_success() {
        let ens = tau_ensemble();
        let g = gamma_operator(&ens, &breidbart_povm()).unwrap();
        assert!(g.anti_hermitian_residual < 1e-12);
        assert!((g.matrix.trace().re - COS2_PI8).abs() < 1e-14);
    }

    #[test]
    fn tau_breidbart_passes_helstrom() {
        let ens = tau_ensemble();
        let report = check_helstrom_conditions(&ens, &breidbart_povm(), 1e-10).unwrap();
        assert!(report.pass, "report: {report:?}");
    }

    #[test]
    fn tau_z_basis_fails_eq7() {
        let ens = tau_ensemble();
        let z = Povm::from_basis(&[Ket::basis(2, 0), Ket::basis(2, 1)]).unwrap();
        let report = check_helstrom_conditions(&ens, &z, 1e-10).unwrap();
        assert!(!report.pass);
        // direct computation puts the worst eigenvalue near -0.0518
        let worst = report.min_eigenvalues.iter().cloned().fold(f64::INFINITY, f64::min);
        assert!((worst - (-0.051776695296636865)).abs() < 1e-12, "worst {worst}");
    }

    #[test]
    fn two_state_bound_edge_cases() {
        let zero = DensityOperator::from_ket(&Ket::basis(2, 0));
        let one = DensityOperator::from_ket(&Ket::basis(2, 1));
        // identical states: max(p0, 1-p0)
        assert!((helstrom_two_state_bound(&zero, &zero, 0.7).unwrap() - 0.7).abs() < 1e-15);
        // orthogonal pure states at equal priors: 1
        assert!((helstrom_two_state_bound(&zero, &one, 0.5).unwrap() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn two_state_bound_tau() {
        let (t0, t1) = tau_states();
        let b = helstrom_two_state_bound(&t0, &t1, 0.5).unwrap();
        assert!((b - COS2_PI8).abs() < 1e-14, "got {b}");
        // achieved by the Breidbart measurement
        let p = success_probability(&tau_ensemble(), &breidbart_povm(), &[0, 1]).unwrap();
        assert!(p <= b + 1e-10);
        assert!((p - b).abs() < 1e-13);
    }

    #[test]
    fn subset_success_uniform_povm_gives_one_third() {
        let sigmas = sigma_operators();
        let eighth = ComplexMatrix::identity(3).scale_re(1.0 / 8.0);
        let povm = Povm::new(vec![eighth; 8]).unwrap();
        let p = subset_success_probability(&sigmas, &povm).unwrap();
        assert!((p - 1.0 / 3.0).abs() < 1e-14, "got {p}");
    }

    #[test]
    fn subset_success_rejects_wrong_count() {
        let sigmas = sigma_operators();
        let half = ComplexMatrix::identity(3).scale_re(0.5);
        let povm = Povm::new(vec![half; 2]).unwrap();
        assert!(subset_success_probability(&sigmas, &povm).is_err());
    }

    #[test]
    fn guess_out_of_range_rejected() {
        let ens = tau_ensemble();
        assert!(success_probability(&ens, &breidbart_povm(), &[0, 5]).is_err());
    }

    #[test]
    fn unitary_invariance_of_success() {
        // conjugating states and effects by the same unitary leaves the
        // success probability unchanged
        let ens = tau_ensemble();
        let povm = breidbart_povm();
        let theta: f64 = 0.3;
        let u = ComplexMatrix::from_real(
            2,
            2,
            &[theta.cos(), -theta.sin(), theta.sin(), theta.cos()],
        );
        let conj = |m: &ComplexMatrix| u.matmul(m).matmul(&u.dagger());
        let states: Vec<EnsembleState> = ens
            .states()
            .iter()
            .map(|s| {
                EnsembleState::Mixed(
                    DensityOperator::from_matrix(conj(&s.density_matrix())).unwrap(),
                )
            })
            .collect();
        let rotated = Ensemble::new(
            vec![2],
            states,
            ens.priors().to_vec(),
            ens.labels().to_vec(),
        )
        .unwrap();
        let rpovm = Povm::new(povm.effects().iter().map(conj).collect()).unwrap();
        let p0 = success_probability(&ens, &povm, &[0, 1]).unwrap();
        let p1 = success_probability(&rotated, &rpovm, &[0, 1]).unwrap();
        assert!((p0 - p1).abs() < tol::CONSTRUCTION);
    }
}
