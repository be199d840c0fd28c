//! Optimal-measurement search and construction.
//!
//! Three routes to an optimum, used to cross-check each other:
//!
//! - [`iterate_min_error`]: a fixed-point iteration whose stationary points
//!   satisfy the Helstrom conditions, applicable to any ensemble;
//! - [`qubit_projective_grid_search`]: an exhaustive scan over real-amplitude
//!   qubit bases, used as an oracle on two-dimensional problems;
//! - [`solve_symmetric_gamma`] / [`build_domino_povm`]: the closed
//!   symmetry-constrained construction of the optimal 8-outcome measurement
//!   for the domino subset problem, certified by
//!   [`verify_guess_function_optimality`] over all 27 guess functions.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use crate::catalog::{
    sigma_operators, symmetry_unitaries, tau_ensemble, twofour_states, GuessFunction,
};
use crate::helstrom::helstrom_two_state_bound;
use crate::matrix::{tol, ComplexMatrix};
use crate::model::{trace_product, DensityOperator, Ensemble, EnsembleState, Ket, Povm};
use crate::{Error, Result};

/// Progress record of [`iterate_min_error`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OptimizerTrace {
    pub iterations: usize,
    /// Success probability after each iteration (index 0 is the initial POVM).
    pub success_sequence: Vec<f64>,
    /// Final worst violation over the full Helstrom condition set.
    pub final_residual: f64,
    /// Largest single-step decrease of the success sequence (0 when the
    /// sequence is monotone; the iteration is observed monotone but this is
    /// recorded rather than assumed).
    pub max_step_decrease: f64,
    pub converged: bool,
}

/// Worst violation of the full Helstrom condition set: the PSD slack of
/// `Γ - p_j ρ_j`, the per-outcome and pairwise residuals, and Γ's
/// anti-Hermitian part.
fn helstrom_residual(weighted: &[ComplexMatrix], effects: &[ComplexMatrix]) -> Result<f64> {
    let dim = weighted[0].rows();
    let mut gamma = ComplexMatrix::zeros(dim, dim);
    for (w, e) in weighted.iter().zip(effects) {
        gamma = gamma.add(&w.matmul(e));
    }
    let gamma_h = gamma.symmetrized();
    let mut residual = gamma.hermitian_residual();
    for (w, e) in weighted.iter().zip(effects) {
        let slack = gamma_h.sub(w);
        residual = residual.max(-slack.eig_hermitian()?.eigenvalues[0]);
        residual = residual.max(slack.matmul(e).frobenius_norm());
    }
    for (i, wi) in weighted.iter().enumerate() {
        for (j, wj) in weighted.iter().enumerate() {
            if i != j {
                residual = residual.max(
                    effects[i].matmul(&wi.sub(wj)).matmul(&effects[j]).frobenius_norm(),
                );
            }
        }
    }
    Ok(residual)
}

/// Fixed-point search for the minimum-error POVM of an ensemble.
///
/// Each step maps `π_j → T (p_j ρ_j) π_j (p_j ρ_j) T` with
/// `T = [Σ_k (p_k ρ_k) π_k (p_k ρ_k)]^{-1/2}`, which preserves positivity and
/// completeness and is stationary exactly at measurements satisfying the
/// Helstrom conditions. Any identity deficit left by a rank-deficient total
/// (states not spanning the space) is redistributed uniformly.
///
/// Starts from `init` or, by default, from the maximally mixed POVM `I/n`.
/// Stops when the worst Helstrom violation drops to `tolerance` (so a
/// converged run certifies at the same tolerance) or after `max_iter` steps;
/// non-convergence is flagged in the trace, not an error. The run is
/// deterministic given the inputs.
pub fn iterate_min_error(
    ensemble: &Ensemble,
    init: Option<&Povm>,
    tolerance: f64,
    max_iter: usize,
) -> Result<(Povm, OptimizerTrace)> {
    let n = ensemble.len();
    let dim = ensemble.dim();
    let weighted: Vec<ComplexMatrix> = (0..n).map(|j| ensemble.weighted_state(j)).collect();

    let mut effects: Vec<ComplexMatrix> = match init {
        Some(p) => {
            if p.len() != n || p.dim() != dim {
                return Err(Error::DimensionMismatch(format!(
                    "initial POVM has {} effects of dim {}, ensemble needs {} of dim {}",
                    p.len(),
                    p.dim(),
                    n,
                    dim
                )));
            }
            p.effects().to_vec()
        }
        None => vec![ComplexMatrix::identity(dim).scale_re(1.0 / n as f64); n],
    };

    let success = |effects: &[ComplexMatrix]| -> f64 {
        weighted
            .iter()
            .zip(effects)
            .map(|(w, e)| trace_product(w, e))
            .sum()
    };

    let mut success_sequence = vec![success(&effects)];
    let mut max_step_decrease: f64 = 0.0;
    let mut final_residual = helstrom_residual(&weighted, &effects)?;
    let mut converged = final_residual <= tolerance;
    let mut iterations = 0;

    while !converged && iterations < max_iter {
        let mut total = ComplexMatrix::zeros(dim, dim);
        let pushed: Vec<ComplexMatrix> = weighted
            .iter()
            .zip(&effects)
            .map(|(w, e)| w.matmul(e).matmul(w))
            .collect();
        for m in &pushed {
            total = total.add(m);
        }
        let inv_sqrt = total.symmetrized().inv_sqrt_psd(1e-14)?;

        let mut new_effects: Vec<ComplexMatrix> = pushed
            .iter()
            .map(|m| inv_sqrt.matmul(m).matmul(&inv_sqrt).symmetrized())
            .collect();
        // redistribute whatever the pseudo-inverse left off the range
        let mut sum = ComplexMatrix::zeros(dim, dim);
        for e in &new_effects {
            sum = sum.add(e);
        }
        let defect = ComplexMatrix::identity(dim).sub(&sum).scale_re(1.0 / n as f64);
        for e in &mut new_effects {
            *e = e.add(&defect);
        }

        effects = new_effects;
        iterations += 1;
        let s = success(&effects);
        let prev = *success_sequence.last().unwrap();
        if s < prev {
            max_step_decrease = max_step_decrease.max(prev - s);
        }
        success_sequence.push(s);
        final_residual = helstrom_residual(&weighted, &effects)?;
        converged = final_residual <= tolerance;
    }

    let povm = Povm::new(effects)?;
    Ok((
        povm,
        OptimizerTrace {
            iterations,
            success_sequence,
            final_residual,
            max_step_decrease,
            converged,
        },
    ))
}

/// Random strictly-positive POVM for multi-start searches: effects
/// `A_j A_j†` with uniform complex entries, jointly normalized to resolve the
/// identity. Deterministic per seed (ChaCha12).
pub fn random_povm(dim: usize, n_effects: usize, seed: u64) -> Result<Povm> {
    let mut rng = ChaCha12Rng::seed_from_u64(seed);
    let raw: Vec<ComplexMatrix> = (0..n_effects)
        .map(|_| {
            let a = ComplexMatrix::from_fn(dim, dim, |_, _| {
                crate::c64(rng.random_range(-1.0..1.0), rng.random_range(-1.0..1.0))
            });
            a.matmul(&a.dagger())
        })
        .collect();
    let mut total = ComplexMatrix::zeros(dim, dim);
    for e in &raw {
        total = total.add(e);
    }
    let inv_sqrt = total.symmetrized().inv_sqrt_psd(1e-14)?;
    Povm::new(
        raw.iter()
            .map(|e| inv_sqrt.matmul(e).matmul(&inv_sqrt).symmetrized())
            .collect(),
    )
}

/// One outcome-to-operator assignment scanned by the grid search.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridAssignment {
    pub name: String,
    /// Index into the weighted-operator list for each of the two outcomes.
    pub targets: [usize; 2],
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct AssignmentBest {
    pub name: String,
    pub angle: f64,
    pub value: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GridSearchResult {
    pub best_value: f64,
    pub best_angle: f64,
    pub best_assignment: String,
    pub per_assignment: Vec<AssignmentBest>,
}

/// Exhaustive scan over real-amplitude orthonormal qubit bases
/// `{(cos θ, sin θ), (sin θ, -cos θ)}`, with θ running over `resolution`
/// points of `[-π/2, π/2)`, maximizing `Σ_m Tr(W_{a(m)} π_m(θ))` over the
/// supplied assignments. The `weighted` operators are prior-weighted states
/// (or effective guess operators), so the value is directly comparable to a
/// success probability.
pub fn qubit_projective_grid_search(
    weighted: &[ComplexMatrix],
    assignments: &[GridAssignment],
    resolution: usize,
) -> Result<GridSearchResult> {
    if weighted.iter().any(|w| w.rows() != 2 || w.cols() != 2) {
        return Err(Error::DimensionMismatch("grid search requires 2x2 operators".into()));
    }
    if resolution < 8 {
        return Err(Error::Numerical(format!("resolution {resolution} < 8")));
    }
    if assignments.is_empty() {
        return Err(Error::Numerical("no assignments supplied".into()));
    }
    for a in assignments {
        if a.targets.iter().any(|&t| t >= weighted.len()) {
            return Err(Error::DimensionMismatch(format!(
                "assignment {} targets outside the operator list",
                a.name
            )));
        }
    }

    // <v|W|v> for the two real basis vectors of angle θ
    let quad = |w: &ComplexMatrix, c: f64, s: f64| -> f64 {
        w[(0, 0)].re * c * c + w[(1, 1)].re * s * s + 2.0 * w[(0, 1)].re * c * s
    };

    let mut per_assignment: Vec<AssignmentBest> = assignments
        .iter()
        .map(|a| AssignmentBest {
            name: a.name.clone(),
            angle: f64::NAN,
            value: f64::NEG_INFINITY,
        })
        .collect();
    for k in 0..resolution {
        let theta = -std::f64::consts::FRAC_PI_2 + k as f64 * std::f64::consts::PI / resolution as f64;
        let (c, s) = (theta.cos(), theta.sin());
        for (a, best) in assignments.iter().zip(&mut per_assignment) {
            // outcome 0 projects on (c, s), outcome 1 on (s, -c)
            let value = quad(&weighted[a.targets[0]], c, s) + quad(&weighted[a.targets[1]], s, -c);
            if value > best.value {
                best.value = value;
                best.angle = theta;
            }
        }
    }
    let winner = per_assignment
        .iter()
        .max_by(|a, b| a.value.total_cmp(&b.value))
        .expect("at least one assignment");
    Ok(GridSearchResult {
        best_value: winner.value,
        best_angle: winner.angle,
        best_assignment: winner.name.clone(),
        per_assignment,
    })
}

/// Grid search over a two-dimensional ensemble, weighting states by their
/// priors. Assignments map each outcome to a state index.
pub fn grid_search_ensemble(
    ensemble: &Ensemble,
    assignments: &[GridAssignment],
    resolution: usize,
) -> Result<GridSearchResult> {
    if ensemble.dim() != 2 {
        return Err(Error::DimensionMismatch(format!(
            "grid search requires dimension 2, ensemble has {}",
            ensemble.dim()
        )));
    }
    let weighted: Vec<ComplexMatrix> =
        (0..ensemble.len()).map(|j| ensemble.weighted_state(j)).collect();
    qubit_projective_grid_search(&weighted, assignments, resolution)
}

/// The symmetry-constrained optimum of the domino subset problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SymmetricGammaSolution {
    pub p: f64,
    pub q: f64,
    /// `Γ = p(|0⟩⟨0| + |2⟩⟨2|) + q|1⟩⟨1|`, exactly of this form.
    pub gamma: ComplexMatrix,
    /// Eight weighted rank-one effects, one per subset.
    pub povm: Povm,
    /// The weight of each effect (equal within each symmetry orbit).
    pub weights: Vec<f64>,
    /// `(8/3)(2p + q)`.
    pub success: f64,
}

fn gamma_of(p: f64, q: f64) -> ComplexMatrix {
    ComplexMatrix::from_real(3, 3, &[p, 0.0, 0.0, 0.0, q, 0.0, 0.0, 0.0, p])
}

/// Solves for the invariant operator `Γ = p(|0⟩⟨0|+|2⟩⟨2|) + q|1⟩⟨1|` such
/// that `Γ - σ_0/8` and `Γ - σ_4/8` are rank-two PSD, each with a single zero
/// eigenvalue, then assembles the optimal 8-outcome measurement.
///
/// The root is found by damped Newton iteration on the pair of smallest
/// eigenvalues (not raw determinants, which admit non-PSD roots), starting
/// from (0.11, 0.09). By the U/V symmetry the remaining six conditions follow
/// from these two.
pub fn solve_symmetric_gamma() -> Result<SymmetricGammaSolution> {
    let sigmas = sigma_operators();
    let d_p = ComplexMatrix::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 1.0]);
    let d_q = ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 0.0]);

    // smallest eigenvalue of Γ(p,q) - σ_k/8 and its gradient in (p, q)
    let min_eig_grad = |p: f64, q: f64, k: usize| -> Result<(f64, f64, f64)> {
        let m = gamma_of(p, q).sub(&sigmas[k].scale_re(1.0 / 8.0));
        let eig = m.eig_hermitian()?;
        let v = &eig.eigenvectors[0];
        let vm = ComplexMatrix::outer(v, v);
        Ok((
            eig.eigenvalues[0],
            trace_product(&vm, &d_p),
            trace_product(&vm, &d_q),
        ))
    };

    let (mut p, mut q) = (0.11, 0.09);
    let mut resid = f64::INFINITY;
    for _ in 0..100 {
        let (f0, g0p, g0q) = min_eig_grad(p, q, 0)?;
        let (f4, g4p, g4q) = min_eig_grad(p, q, 4)?;
        resid = f0.abs().max(f4.abs());
        if resid <= 1e-14 {
            break;
        }
        let det = g0p * g4q - g0q * g4p;
        if det.abs() < 1e-16 {
            return Err(Error::Numerical("singular Jacobian in Γ root solve".into()));
        }
        let dp = (f0 * g4q - f4 * g0q) / det;
        let dq = (g0p * f4 - g4p * f0) / det;
        // damped step: halve until the residual does not grow
        let mut step = 1.0;
        loop {
            let (pt, qt) = (p - step * dp, q - step * dq);
            let (f0t, _, _) = min_eig_grad(pt, qt, 0)?;
            let (f4t, _, _) = min_eig_grad(pt, qt, 4)?;
            if f0t.abs().max(f4t.abs()) <= resid || step < 1e-6 {
                p = pt;
                q = qt;
                break;
            }
            step *= 0.5;
        }
    }
    if resid > 1e-12 {
        return Err(Error::Numerical(format!(
            "Γ root solve stalled at residual {resid:.3e}"
        )));
    }

    // PSD branch: both matrices rank-two PSD
    for k in [0usize, 4] {
        let eig = gamma_of(p, q)
            .sub(&sigmas[k].scale_re(1.0 / 8.0))
            .eig_hermitian()?;
        if eig.eigenvalues[0] < -tol::CERTIFICATION || eig.eigenvalues[1] < 1e-6 {
            return Err(Error::Numerical(format!(
                "root solve landed off the rank-two PSD branch for σ_{k}"
            )));
        }
    }

    let (povm, weights) = build_domino_povm(p, q)?;
    let gamma = gamma_of(p, q);
    let success = (8.0 / 3.0) * (2.0 * p + q);

    // invariance Γ = UΓU† = VΓV† holds for any diag(p, q, p); assert anyway
    let (u, v) = symmetry_unitaries();
    for w in [&u, &v] {
        let conj = w.matmul(&gamma).matmul(&w.dagger());
        debug_assert!(conj.sub(&gamma).frobenius_norm() < 1e-14);
        let _ = conj;
    }

    Ok(SymmetricGammaSolution { p, q, gamma, povm, weights, success })
}

/// Assembles the 8-outcome domino measurement from a solved `(p, q)`:
/// `π_k = w_k |v_k⟩⟨v_k|` with `v_k` the kernel direction of `Γ - σ_k/8`,
/// and the two orbit weights solved so the effects resolve the identity.
///
/// Returns the POVM and the eight per-effect weights. Fails if any kernel is
/// degenerate, a weight comes out negative, or the completeness residual
/// exceeds the certification tolerance.
pub fn build_domino_povm(p: f64, q: f64) -> Result<(Povm, Vec<f64>)> {
    let sigmas = sigma_operators();
    let gamma = gamma_of(p, q);
    let projectors: Vec<ComplexMatrix> = sigmas
        .iter()
        .map(|s| {
            let v = gamma.sub(&s.scale_re(1.0 / 8.0)).zero_eigenvector(1e-9)?;
            Ok(ComplexMatrix::outer(&v, &v))
        })
        .collect::<Result<_>>()?;

    // least squares over the two orbit weights for Σ w_k v_k v_k† = I:
    // 9 complex entries → 18 real equations in 2 unknowns
    let mut orbit = [ComplexMatrix::zeros(3, 3), ComplexMatrix::zeros(3, 3)];
    for (k, pr) in projectors.iter().enumerate() {
        let o = if k < 4 { 0 } else { 1 };
        orbit[o] = orbit[o].add(pr);
    }
    let (mut ata, mut atb) = ([[0.0f64; 2]; 2], [0.0f64; 2]);
    for i in 0..3 {
        for j in 0..3 {
            let target = if i == j { 1.0 } else { 0.0 };
            let a = [orbit[0][(i, j)], orbit[1][(i, j)]];
            for (part, t) in [(a.map(|z| z.re), target), (a.map(|z| z.im), 0.0)] {
                for r in 0..2 {
                    for c in 0..2 {
                        ata[r][c] += part[r] * part[c];
                    }
                    atb[r] += part[r] * t;
                }
            }
        }
    }
    let det = ata[0][0] * ata[1][1] - ata[0][1] * ata[1][0];
    if det.abs() < 1e-12 {
        return Err(Error::Numerical("degenerate orbit weight system".into()));
    }
    let w_a = (atb[0] * ata[1][1] - atb[1] * ata[0][1]) / det;
    let w_b = (ata[0][0] * atb[1] - ata[1][0] * atb[0]) / det;
    if w_a < 0.0 || w_b < 0.0 {
        return Err(Error::Numerical(format!(
            "negative orbit weights ({w_a:.6}, {w_b:.6})"
        )));
    }
    let residual = orbit[0]
        .scale_re(w_a)
        .add(&orbit[1].scale_re(w_b))
        .sub(&ComplexMatrix::identity(3))
        .frobenius_norm();
    if residual > tol::CERTIFICATION {
        return Err(Error::Numerical(format!(
            "weighted projectors miss the identity by {residual:.3e}"
        )));
    }

    let weights: Vec<f64> = (0..8).map(|k| if k < 4 { w_a } else { w_b }).collect();
    let effects: Vec<ComplexMatrix> = projectors
        .iter()
        .zip(&weights)
        .map(|(pr, &w)| pr.scale_re(w))
        .collect();
    Ok((Povm::new(effects)?, weights))
}

/// Per-guess-function outcome of the 27-operator optimality check.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GuessFunctionCheck {
    pub guess: GuessFunction,
    pub min_eigenvalue: f64,
    pub kernel_hit: bool,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct GuessOptimalityReport {
    pub checks: Vec<GuessFunctionCheck>,
    pub kernel_hits: usize,
    pub strictly_positive: usize,
    pub psd_failures: usize,
    pub pass: bool,
}

/// Verifies that the symmetry-constrained measurement stays optimal when all
/// guess functions compete: rescaled to the effective-operator normalization
/// (`Γ' = (8/3)Γ`, matching `A_g = σ_k/3` on the subset functions),
/// `Γ' - A_g` must be PSD for every g, with a kernel exactly on the eight
/// subset functions and strictly positive minimum (> 1e-6) elsewhere.
pub fn verify_guess_function_optimality(
    gamma: &ComplexMatrix,
    guess_operators: &[(GuessFunction, ComplexMatrix)],
) -> Result<GuessOptimalityReport> {
    let gamma_prime = gamma.scale_re(8.0 / 3.0);
    let mut checks = Vec::with_capacity(guess_operators.len());
    for (g, a) in guess_operators {
        let min_eigenvalue = gamma_prime.sub(a).eig_hermitian()?.eigenvalues[0];
        checks.push(GuessFunctionCheck {
            guess: g.clone(),
            min_eigenvalue,
            kernel_hit: min_eigenvalue.abs() <= 1e-8,
        });
    }
    let kernel_hits = checks.iter().filter(|c| c.kernel_hit).count();
    let strictly_positive = checks.iter().filter(|c| c.min_eigenvalue > 1e-6).count();
    let psd_failures = checks
        .iter()
        .filter(|c| c.min_eigenvalue < -tol::CERTIFICATION)
        .count();
    let pass = psd_failures == 0
        && kernel_hits == 8
        && strictly_positive == checks.len().saturating_sub(8);
    Ok(GuessOptimalityReport {
        checks,
        kernel_hits,
        strictly_positive,
        psd_failures,
        pass,
    })
}

/// A one-way ceiling computed two independent ways.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct BoundAnalysis {
    /// Closed-form two-state Helstrom bound.
    pub trace_norm_bound: f64,
    /// The same problem handed to the fixed-point optimizer.
    pub optimizer_value: f64,
    pub optimizer_converged: bool,
}

/// The one-way reduction analyses for every catalog problem.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct OnewayAnalyses {
    /// Backward (B→A) bound for the two-qubit basis: the τ problem.
    pub gv_backward: BoundAnalysis,
    /// Forward (A→B) bound for the 2⊗4 basis via Alice's
    /// `{|0⟩,|+⟩}` vs `{|1⟩,|-⟩}` reduction.
    pub twofour_forward: BoundAnalysis,
    /// Backward (B→A) bound for the 2⊗4 basis: prior-weighted combination of
    /// the two within-subset reductions.
    pub twofour_backward: BoundAnalysis,
    /// One-way ceiling of the domino problem, from the symmetric Γ solution.
    pub domino_oneway: f64,
}

fn binary_analysis(ensemble: &Ensemble) -> Result<BoundAnalysis> {
    let to_density = |s: &EnsembleState| match s {
        EnsembleState::Mixed(d) => d.clone(),
        EnsembleState::Pure(k) => DensityOperator::from_ket(k),
    };
    let bound = helstrom_two_state_bound(
        &to_density(&ensemble.states()[0]),
        &to_density(&ensemble.states()[1]),
        ensemble.priors()[0],
    )?;
    let (_, trace) = iterate_min_error(ensemble, None, 1e-10, 10_000)?;
    Ok(BoundAnalysis {
        trace_norm_bound: bound,
        optimizer_value: *trace.success_sequence.last().unwrap(),
        optimizer_converged: trace.converged,
    })
}

fn combine(a: BoundAnalysis, b: BoundAnalysis, wa: f64, wb: f64) -> BoundAnalysis {
    BoundAnalysis {
        trace_norm_bound: wa * a.trace_norm_bound + wb * b.trace_norm_bound,
        optimizer_value: wa * a.optimizer_value + wb * b.optimizer_value,
        optimizer_converged: a.optimizer_converged && b.optimizer_converged,
    }
}

/// Computes every one-way ceiling: the τ problem for the two-qubit basis,
/// both reductions of the 2⊗4 basis, and the domino subset optimum.
pub fn oneway_bound_analyses() -> Result<OnewayAnalyses> {
    let gv_backward = binary_analysis(&tau_ensemble())?;

    // Alice-side reduction of the 2⊗4 basis: rows i = 0, 1 of the labels
    let tf = twofour_states();
    let mu_states: Vec<EnsembleState> = (0..2)
        .map(|i| {
            let alices: Vec<Ket> = tf
                .states
                .iter()
                .filter(|s| s.label.i == i)
                .map(|s| s.alice.clone())
                .collect();
            Ok(EnsembleState::Mixed(DensityOperator::uniform_mixture(&alices)?))
        })
        .collect::<Result<_>>()?;
    let mu = Ensemble::new(
        vec![2],
        mu_states,
        vec![0.5, 0.5],
        vec!["row_0".into(), "row_1".into()],
    )?;
    let twofour_forward = binary_analysis(&mu)?;

    // Bob-side within-subset reductions: subspace s holds columns {2s, 2s+1},
    // paired across rows by the column index
    let mut subproblems = Vec::new();
    for s in 0..2 {
        let nu: Vec<EnsembleState> = (0..2)
            .map(|t| {
                let bobs: Vec<Ket> = tf
                    .states
                    .iter()
                    .filter(|st| st.label.j == 2 * s + t)
                    .map(|st| st.bob.clone())
                    .collect();
                Ok(EnsembleState::Mixed(DensityOperator::uniform_mixture(&bobs)?))
            })
            .collect::<Result<_>>()?;
        subproblems.push(binary_analysis(&Ensemble::new(
            vec![4],
            nu,
            vec![0.5, 0.5],
            vec![format!("col_{}", 2 * s), format!("col_{}", 2 * s + 1)],
        )?)?);
    }
    let twofour_backward = combine(
        subproblems.remove(0),
        subproblems.remove(0),
        0.5,
        0.5,
    );

    let domino_oneway = solve_symmetric_gamma()?.success;

    Ok(OnewayAnalyses {
        gv_backward,
        twofour_forward,
        twofour_backward,
        domino_oneway,
    })
}

/// Reference constants for the domino construction, matching the closed forms
/// `p = (51 + √1953)/864`, `q = (63 + √1953)/1152`, and
/// `P = (597 + 11√1953)/1296`.
pub mod reference {
    /// `(51 + √1953)/864`.
    pub const P_SOLVED: f64 = 0.11017680507866749;
    /// `(63 + √1953)/1152`.
    pub const Q_SOLVED: f64 = 0.09304927047566729;
    /// `(8/3)(2p + q) = (597 + 11√1953)/1296`.
    pub const DOMINO_ONEWAY_SUCCESS: f64 = 0.8357410150213394;
    /// `cos²(π/8) = (1 + 1/√2)/2`.
    pub const COS2_PI_8: f64 = 0.8535533905932737;
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::catalog::effective_guess_operators;
    use crate::helstrom::{check_helstrom_conditions, subset_success_probability};
    use crate::matrix::Party;
    use crate::model::validate_povm;

    #[test]
    fn iterate_on_orthonormal_basis_reaches_one() {
        let ens = crate::catalog::gv_ensemble();
        let (povm, trace) = iterate_min_error(&ens, None, 1e-9, 5000).unwrap();
        assert!(trace.converged, "residual {}", trace.final_residual);
        let last = *trace.success_sequence.last().unwrap();
        assert!((last - 1.0).abs() < 1e-8, "got {last}");
        assert_eq!(povm.len(), 4);
        assert!(trace.max_step_decrease <= 1e-12);
    }

    #[test]
    fn iterate_on_tau_matches_breidbart_value() {
        let ens = tau_ensemble();
        let (_, trace) = iterate_min_error(&ens, None, 1e-9, 5000).unwrap();
        assert!(trace.converged);
        let last = *trace.success_sequence.last().unwrap();
        assert!((last - reference::COS2_PI_8).abs() < 1e-6, "got {last}");
        assert!(trace.max_step_decrease <= 1e-12);
    }

    #[test]
    fn iterate_on_sigma_matches_symmetric_solution() {
        let ens = crate::catalog::sigma_ensemble();
        let (_, trace) = iterate_min_error(&ens, None, 1e-9, 5000).unwrap();
        assert!(trace.converged);
        let scaled = 8.0 / 3.0 * trace.success_sequence.last().unwrap();
        assert!(
            (scaled - reference::DOMINO_ONEWAY_SUCCESS).abs() < 1e-5,
            "got {scaled}"
        );
    }

    #[test]
    fn solve_symmetric_gamma_matches_root_oracle() {
        let sol = solve_symmetric_gamma().unwrap();
        // independent oracle: eliminate q via the σ_0 determinant condition
        // (p - 5/48)(q - 1/48) = 1/2304 and bisect the σ_4 condition
        // (p - 1/48)(q - 1/12) = 1/1152 in p
        let q_of_p = |p: f64| 1.0 / 48.0 + (1.0 / 2304.0) / (p - 5.0 / 48.0);
        let h = |p: f64| (p - 1.0 / 48.0) * (q_of_p(p) - 1.0 / 12.0) - 1.0 / 1152.0;
        let (mut lo, mut hi) = (5.0 / 48.0 + 1e-9, 0.5);
        assert!(h(lo) * h(hi) < 0.0);
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if h(lo) * h(mid) <= 0.0 {
                hi = mid;
            } else {
                lo = mid;
            }
        }
        let p_oracle = 0.5 * (lo + hi);
        let q_oracle = q_of_p(p_oracle);
        assert!((sol.p - p_oracle).abs() < 1e-10, "p {} vs {}", sol.p, p_oracle);
        assert!((sol.q - q_oracle).abs() < 1e-10, "q {} vs {}", sol.q, q_oracle);
        // and the closed forms
        assert!((sol.p - reference::P_SOLVED).abs() < 1e-12);
        assert!((sol.q - reference::Q_SOLVED).abs() < 1e-12);
        assert!((sol.success - (8.0 / 3.0) * (2.0 * sol.p + sol.q)).abs() < 1e-12);
        assert!((sol.success - reference::DOMINO_ONEWAY_SUCCESS).abs() < 1e-12);
    }

    #[test]
    fn symmetric_solution_invariants() {
        let sol = solve_symmetric_gamma().unwrap();
        let sigmas = sigma_operators();
        for s in &sigmas {
            let m = sol.gamma.sub(&s.scale_re(1.0 / 8.0));
            let eig = m.eig_hermitian().unwrap();
            assert!(eig.eigenvalues[0] >= -1e-10);
            assert!(eig.eigenvalues[0].abs() <= 1e-10, "kernel missing");
            assert!(eig.eigenvalues[1] > 1e-6, "not rank two");
        }
        let report = validate_povm(sol.povm.effects(), 1e-10).unwrap();
        assert!(report.pass);
        // orbit weights equal within orbits
        assert!((sol.weights[0] - sol.weights[3]).abs() < 1e-12);
        assert!((sol.weights[4] - sol.weights[7]).abs() < 1e-12);
        // frozen from the least-squares solve
        assert!((sol.weights[0] - 0.5168402766035342).abs() < 1e-10);
        assert!((sol.weights[4] - 0.2331597233964657).abs() < 1e-10);
    }

    #[test]
    fn sigma0_kernel_vector_avoids_third_level() {
        // Γ - σ_0/8 acts as the strictly positive scalar p on |2⟩, so its
        // kernel direction is a real vector in span{|0⟩, |1⟩}
        let sol = solve_symmetric_gamma().unwrap();
        let sigmas = sigma_operators();
        let v = sol
            .gamma
            .sub(&sigmas[0].scale_re(1.0 / 8.0))
            .zero_eigenvector(1e-9)
            .unwrap();
        assert!(v[2].norm() < 1e-12, "component on |2⟩ is {}", v[2]);
        assert!(v.iter().all(|z| z.im.abs() < 1e-12));
        assert!(v[0].re > 0.0 && v[1].re != 0.0);
    }

    #[test]
    fn symmetric_povm_passes_helstrom_and_formula() {
        let sol = solve_symmetric_gamma().unwrap();
        let sigmas = sigma_operators();
        let p = subset_success_probability(&sigmas, &sol.povm).unwrap();
        assert!((p - sol.success).abs() < 1e-12, "formula {p} vs {}", sol.success);
        let report =
            check_helstrom_conditions(&crate::catalog::sigma_ensemble(), &sol.povm, 1e-9).unwrap();
        assert!(report.pass, "{report:?}");
    }

    #[test]
    fn symmetric_povm_is_covariant() {
        let sol = solve_symmetric_gamma().unwrap();
        let (u, v) = symmetry_unitaries();
        for w in [&u, &v] {
            for e in sol.povm.effects() {
                let c = w.matmul(e).matmul(&w.dagger());
                let hits = sol
                    .povm
                    .effects()
                    .iter()
                    .filter(|f| f.sub(&c).frobenius_norm() < 1e-10)
                    .count();
                assert_eq!(hits, 1, "conjugated effect not a permutation of the set");
            }
        }
    }

    #[test]
    fn mispaired_povm_scores_lower() {
        let sol = solve_symmetric_gamma().unwrap();
        let sigmas = sigma_operators();
        let mut effects = sol.povm.effects().to_vec();
        effects.swap(0, 1);
        let permuted = Povm::new(effects).unwrap();
        let p = subset_success_probability(&sigmas, &permuted).unwrap();
        assert!(p < sol.success - 1e-3, "permuted {p} not below {}", sol.success);
    }

    #[test]
    fn guess_function_report() {
        let sol = solve_symmetric_gamma().unwrap();
        let a_gs =
            effective_guess_operators(&crate::catalog::domino_row_mixtures(), Party::B).unwrap();
        let report = verify_guess_function_optimality(&sol.gamma, &a_gs).unwrap();
        assert!(report.pass, "{report:?}");
        assert_eq!(report.kernel_hits, 8);
        assert_eq!(report.strictly_positive, 19);
        assert_eq!(report.psd_failures, 0);
        // (0,0,0) is a kernel hit, (0,1,2) is never identified
        let find = |vals: &[usize]| {
            report
                .checks
                .iter()
                .find(|c| c.guess.values() == vals)
                .unwrap()
                .clone()
        };
        assert!(find(&[0, 0, 0]).kernel_hit);
        let c012 = find(&[0, 1, 2]);
        assert!(!c012.kernel_hit && c012.min_eigenvalue > 1e-6);
    }

    #[test]
    fn grid_search_tau() {
        let ens = tau_ensemble();
        let assignments = [
            GridAssignment { name: "identity".into(), targets: [0, 1] },
            GridAssignment { name: "swapped".into(), targets: [1, 0] },
        ];
        let res = grid_search_ensemble(&ens, &assignments, 7201).unwrap();
        assert!(res.best_value <= reference::COS2_PI_8 + 1e-9);
        assert!((res.best_value - reference::COS2_PI_8).abs() < 1e-7);
        let id_best = &res.per_assignment[0];
        assert!((id_best.angle - std::f64::consts::PI / 8.0).abs() < std::f64::consts::PI / 7201.0);
        assert!((id_best.value - reference::COS2_PI_8).abs() < 1e-7);
    }

    #[test]
    fn grid_search_degenerate_assignments() {
        // the four guess-function operators of the backward gv problem: the
        // S_00/S_11 and S_01/S_10 pairings peak at ±π/8 with the same value
        let states = crate::catalog::gv_states();
        let omegas: Vec<EnsembleState> = (0..2)
            .map(|j| {
                let kets: Vec<Ket> = states
                    .states
                    .iter()
                    .filter(|s| s.label.j == j)
                    .map(|s| s.joint())
                    .collect();
                EnsembleState::Mixed(DensityOperator::uniform_mixture(&kets).unwrap())
            })
            .collect();
        let ens = Ensemble::new(
            vec![2, 2],
            omegas,
            vec![0.5, 0.5],
            vec!["omega_0".into(), "omega_1".into()],
        )
        .unwrap();
        let a_gs = effective_guess_operators(&ens, Party::A).unwrap();
        let weighted: Vec<ComplexMatrix> = a_gs.iter().map(|(_, a)| a.clone()).collect();
        // enumeration order: (0,0)=S_00, (0,1)=S_01, (1,0)=S_10, (1,1)=S_11
        let assignments = [
            GridAssignment { name: "S00/S11".into(), targets: [0, 3] },
            GridAssignment { name: "S01/S10".into(), targets: [1, 2] },
        ];
        let res = qubit_projective_grid_search(&weighted, &assignments, 7201).unwrap();
        let (a, b) = (&res.per_assignment[0], &res.per_assignment[1]);
        assert!((a.value - b.value).abs() < 1e-12, "degenerate optima differ");
        assert!((a.angle - std::f64::consts::PI / 8.0).abs() < 5e-4);
        assert!((b.angle + std::f64::consts::PI / 8.0).abs() < 5e-4);
        assert!(res.best_value <= reference::COS2_PI_8 + 1e-9);
    }

    #[test]
    fn grid_search_trivial_ensemble() {
        let ens = Ensemble::equiprobable(
            vec![2],
            vec![
                EnsembleState::Pure(Ket::basis(2, 0)),
                EnsembleState::Pure(Ket::basis(2, 1)),
            ],
        )
        .unwrap();
        let res = grid_search_ensemble(
            &ens,
            &[GridAssignment { name: "identity".into(), targets: [0, 1] }],
            7201,
        )
        .unwrap();
        assert!((res.best_value - 1.0).abs() < 1e-7);
        assert!(res.best_angle.abs() < 1e-3);
    }

    #[test]
    fn oneway_analyses_agree() {
        let a = oneway_bound_analyses().unwrap();
        for (name, b) in [
            ("gv_backward", &a.gv_backward),
            ("twofour_forward", &a.twofour_forward),
            ("twofour_backward", &a.twofour_backward),
        ] {
            assert!(
                (b.trace_norm_bound - reference::COS2_PI_8).abs() < 1e-12,
                "{name} bound {}",
                b.trace_norm_bound
            );
            assert!(b.optimizer_converged, "{name} did not converge");
            assert!(
                (b.optimizer_value - reference::COS2_PI_8).abs() < 1e-6,
                "{name} optimizer {}",
                b.optimizer_value
            );
        }
        assert!((a.domino_oneway - reference::DOMINO_ONEWAY_SUCCESS).abs() < 1e-12);
        // the one-way error for the domino problem exceeds 16%
        assert!(1.0 - a.domino_oneway > 0.16);
    }

    #[test]
    fn random_povm_is_valid_and_deterministic() {
        let a = random_povm(3, 8, 42).unwrap();
        let b = random_povm(3, 8, 42).unwrap();
        assert_eq!(a, b);
        let c = random_povm(3, 8, 43).unwrap();
        assert_ne!(a, c);
    }
}
