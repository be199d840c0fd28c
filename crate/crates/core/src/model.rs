//! Quantum data model: kets, density operators, ensembles with priors, and
//! POVMs, plus the Born rule.
//!
//! JSON encodings: a complex number is a two-element array `[re, im]`; a ket
//! is `{"dim": n, "amps": [[re,im], ...]}`; an operator is a row-major nested
//! array of `[re, im]`; an ensemble is
//! `{"dims": [dA, dB], "priors": [...], "states": [...]}` where each state is
//! either a ket object or an operator array; a POVM is `{"effects": [...]}`.

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::matrix::{c64, inner, norm, tol, ComplexMatrix};
use crate::{Error, Result};

/// Pure state: unit-norm complex amplitude vector.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "KetJson", into = "KetJson")]
pub struct Ket {
    amps: Vec<Complex64>,
}

#[derive(Serialize, Deserialize)]
struct KetJson {
    dim: usize,
    amps: Vec<[f64; 2]>,
}

impl TryFrom<KetJson> for Ket {
    type Error = Error;

    fn try_from(j: KetJson) -> Result<Self> {
        if j.amps.len() != j.dim {
            return Err(Error::ShapeMismatch(format!(
                "ket dim {} but {} amplitudes",
                j.dim,
                j.amps.len()
            )));
        }
        Ket::new(j.amps.into_iter().map(|[re, im]| c64(re, im)).collect())
    }
}

impl From<Ket> for KetJson {
    fn from(k: Ket) -> KetJson {
        KetJson {
            dim: k.dim(),
            amps: k.amps.iter().map(|z| [z.re, z.im]).collect(),
        }
    }
}

impl Ket {
    /// Builds a ket, renormalizing inputs whose norm is within 1e-6 of 1 and
    /// rejecting anything further off (catches a missing 1/√2 in hand-entered
    /// states).
    pub fn new(amps: Vec<Complex64>) -> Result<Self> {
        if amps.is_empty() {
            return Err(Error::ShapeMismatch("empty ket".into()));
        }
        if amps.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        let n = norm(&amps);
        if (n - 1.0).abs() > 1e-6 {
            return Err(Error::NotNormalized { norm: n });
        }
        let amps = amps.into_iter().map(|z| z / n).collect();
        Ok(Self { amps })
    }

    /// Computational basis state `|i⟩`.
    pub fn basis(dim: usize, i: usize) -> Self {
        assert!(i < dim);
        let mut amps = vec![Complex64::ZERO; dim];
        amps[i] = Complex64::ONE;
        Self { amps }
    }

    /// Normalized two-term superposition `(|i⟩ + sign·|j⟩)/√2`.
    pub fn two_term(dim: usize, i: usize, j: usize, sign: f64) -> Self {
        assert!(i < dim && j < dim && i != j);
        let s = 1.0 / 2f64.sqrt();
        let mut amps = vec![Complex64::ZERO; dim];
        amps[i] = c64(s, 0.0);
        amps[j] = c64(sign * s, 0.0);
        Self { amps }
    }

    /// Real-amplitude ket from components, normalized exactly.
    pub fn from_real(amps: &[f64]) -> Result<Self> {
        Ket::new(amps.iter().map(|&x| c64(x, 0.0)).collect())
    }

    pub fn dim(&self) -> usize {
        self.amps.len()
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    /// `⟨self|other⟩`.
    pub fn inner(&self, other: &Ket) -> Complex64 {
        inner(&self.amps, &other.amps)
    }

    /// Projector `|ψ⟩⟨ψ|`.
    pub fn projector(&self) -> ComplexMatrix {
        ComplexMatrix::outer(&self.amps, &self.amps)
    }

    /// Tensor product `|self⟩ ⊗ |other⟩`.
    pub fn tensor(&self, other: &Ket) -> Ket {
        let mut amps = Vec::with_capacity(self.dim() * other.dim());
        for a in &self.amps {
            for b in &other.amps {
                amps.push(a * b);
            }
        }
        Ket { amps }
    }
}

/// Mixed state: PSD, unit-trace Hermitian operator.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ComplexMatrix", into = "ComplexMatrix")]
pub struct DensityOperator {
    matrix: ComplexMatrix,
}

impl TryFrom<ComplexMatrix> for DensityOperator {
    type Error = Error;

    fn try_from(m: ComplexMatrix) -> Result<Self> {
        DensityOperator::from_matrix(m)
    }
}

impl From<DensityOperator> for ComplexMatrix {
    fn from(d: DensityOperator) -> ComplexMatrix {
        d.matrix
    }
}

impl DensityOperator {
    /// Validates Hermiticity (symmetrizing residuals below the rejection
    /// threshold), positivity, and unit trace.
    pub fn from_matrix(m: ComplexMatrix) -> Result<Self> {
        if !m.is_square() {
            return Err(Error::InvalidDensity("not square".into()));
        }
        let residual = m.hermitian_residual();
        if residual > tol::HERMITICITY_REJECT {
            return Err(Error::NonHermitian { residual });
        }
        let m = m.symmetrized();
        let check = m.is_psd(tol::CERTIFICATION)?;
        if !check.psd {
            return Err(Error::InvalidDensity(format!(
                "not PSD (min eigenvalue {:.3e})",
                check.min_eigenvalue
            )));
        }
        let tr = m.trace();
        if (tr.re - 1.0).abs() > tol::CERTIFICATION || tr.im.abs() > tol::CERTIFICATION {
            return Err(Error::InvalidDensity(format!("trace {} != 1", tr)));
        }
        Ok(Self { matrix: m })
    }

    pub fn from_ket(k: &Ket) -> Self {
        Self { matrix: k.projector() }
    }

    /// Equal mixture of the given kets.
    pub fn uniform_mixture(kets: &[Ket]) -> Result<Self> {
        if kets.is_empty() {
            return Err(Error::InvalidDensity("empty mixture".into()));
        }
        let dim = kets[0].dim();
        let mut m = ComplexMatrix::zeros(dim, dim);
        for k in kets {
            if k.dim() != dim {
                return Err(Error::DimensionMismatch("mixture of unequal dims".into()));
            }
            m = m.add(&k.projector());
        }
        Ok(Self {
            matrix: m.scale_re(1.0 / kets.len() as f64),
        })
    }

    pub fn dim(&self) -> usize {
        self.matrix.rows()
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.matrix
    }
}

/// A state in an ensemble: pure states are kept as kets and promoted to
/// projectors on demand.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum EnsembleState {
    Pure(Ket),
    Mixed(DensityOperator),
}

impl EnsembleState {
    pub fn dim(&self) -> usize {
        match self {
            EnsembleState::Pure(k) => k.dim(),
            EnsembleState::Mixed(d) => d.dim(),
        }
    }

    pub fn density_matrix(&self) -> ComplexMatrix {
        match self {
            EnsembleState::Pure(k) => k.projector(),
            EnsembleState::Mixed(d) => d.matrix().clone(),
        }
    }

    pub fn as_pure(&self) -> Option<&Ket> {
        match self {
            EnsembleState::Pure(k) => Some(k),
            EnsembleState::Mixed(_) => None,
        }
    }
}

/// States with prior probabilities on a bipartite (or general multipartite)
/// system.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "EnsembleJson", into = "EnsembleJson")]
pub struct Ensemble {
    dims: Vec<usize>,
    states: Vec<EnsembleState>,
    priors: Vec<f64>,
    labels: Vec<String>,
}

#[derive(Serialize, Deserialize)]
struct EnsembleJson {
    dims: Vec<usize>,
    priors: Vec<f64>,
    states: Vec<EnsembleState>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    labels: Option<Vec<String>>,
}

impl TryFrom<EnsembleJson> for Ensemble {
    type Error = Error;

    fn try_from(j: EnsembleJson) -> Result<Self> {
        let labels = j
            .labels
            .unwrap_or_else(|| (0..j.states.len()).map(|k| k.to_string()).collect());
        Ensemble::new(j.dims, j.states, j.priors, labels)
    }
}

impl From<Ensemble> for EnsembleJson {
    fn from(e: Ensemble) -> EnsembleJson {
        EnsembleJson {
            dims: e.dims,
            priors: e.priors,
            states: e.states,
            labels: Some(e.labels),
        }
    }
}

impl Ensemble {
    pub fn new(
        dims: Vec<usize>,
        states: Vec<EnsembleState>,
        priors: Vec<f64>,
        labels: Vec<String>,
    ) -> Result<Self> {
        if dims.is_empty() || dims.contains(&0) {
            return Err(Error::InvalidEnsemble("empty or zero subsystem dims".into()));
        }
        let dim: usize = dims.iter().product();
        if states.is_empty() {
            return Err(Error::InvalidEnsemble("no states".into()));
        }
        if states.len() != priors.len() || states.len() != labels.len() {
            return Err(Error::InvalidEnsemble(format!(
                "{} states, {} priors, {} labels",
                states.len(),
                priors.len(),
                labels.len()
            )));
        }
        if let Some(s) = states.iter().find(|s| s.dim() != dim) {
            return Err(Error::DimensionMismatch(format!(
                "state of dim {} in ensemble of dim {}",
                s.dim(),
                dim
            )));
        }
        if priors.iter().any(|&p| p.is_nan() || p < 0.0 || !p.is_finite()) {
            return Err(Error::InvalidEnsemble("negative or non-finite prior".into()));
        }
        let total: f64 = priors.iter().sum();
        if (total - 1.0).abs() > tol::CONSTRUCTION {
            return Err(Error::InvalidEnsemble(format!("priors sum to {total}")));
        }
        Ok(Self { dims, states, priors, labels })
    }

    /// Equiprobable ensemble with default labels `"0", "1", ...`.
    pub fn equiprobable(dims: Vec<usize>, states: Vec<EnsembleState>) -> Result<Self> {
        let n = states.len();
        let labels = (0..n).map(|k| k.to_string()).collect();
        Ensemble::new(dims, states, vec![1.0 / n as f64; n], labels)
    }

    pub fn dims(&self) -> &[usize] {
        &self.dims
    }

    /// Total Hilbert-space dimension.
    pub fn dim(&self) -> usize {
        self.dims.iter().product()
    }

    /// Bipartite split, when the ensemble has exactly two subsystems.
    pub fn bipartite_dims(&self) -> Result<(usize, usize)> {
        if self.dims.len() != 2 {
            return Err(Error::DimensionMismatch(format!(
                "expected a bipartite system, found {} subsystems",
                self.dims.len()
            )));
        }
        Ok((self.dims[0], self.dims[1]))
    }

    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }

    pub fn states(&self) -> &[EnsembleState] {
        &self.states
    }

    pub fn priors(&self) -> &[f64] {
        &self.priors
    }

    pub fn labels(&self) -> &[String] {
        &self.labels
    }

    pub fn label_index(&self, label: &str) -> Result<usize> {
        self.labels
            .iter()
            .position(|l| l == label)
            .ok_or_else(|| Error::UnknownGuess(label.to_string()))
    }

    /// Prior-weighted state `p_j ρ_j`.
    pub fn weighted_state(&self, j: usize) -> ComplexMatrix {
        self.states[j].density_matrix().scale_re(self.priors[j])
    }
}

/// A POVM: positive effects resolving the identity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "PovmJson", into = "PovmJson")]
pub struct Povm {
    effects: Vec<ComplexMatrix>,
}

#[derive(Serialize, Deserialize)]
struct PovmJson {
    effects: Vec<ComplexMatrix>,
}

impl TryFrom<PovmJson> for Povm {
    type Error = Error;

    fn try_from(j: PovmJson) -> Result<Self> {
        Povm::new(j.effects)
    }
}

impl From<Povm> for PovmJson {
    fn from(p: Povm) -> PovmJson {
        PovmJson { effects: p.effects }
    }
}

impl Povm {
    /// Validates positivity and completeness at the certification tolerance.
    pub fn new(effects: Vec<ComplexMatrix>) -> Result<Self> {
        let report = validate_povm(&effects, tol::CERTIFICATION)?;
        if !report.pass {
            return Err(Error::InvalidPovm(format!(
                "completeness residual {:.3e}, min effect eigenvalue {:.3e}",
                report.max_completeness_residual, report.min_effect_eigenvalue
            )));
        }
        Ok(Self { effects })
    }

    /// Projectors of an orthonormal basis.
    pub fn from_basis(basis: &[Ket]) -> Result<Self> {
        Povm::new(basis.iter().map(|k| k.projector()).collect())
    }

    pub fn len(&self) -> usize {
        self.effects.len()
    }

    pub fn is_empty(&self) -> bool {
        self.effects.is_empty()
    }

    pub fn dim(&self) -> usize {
        self.effects.first().map_or(0, |e| e.rows())
    }

    pub fn effects(&self) -> &[ComplexMatrix] {
        &self.effects
    }
}

/// Report of [`validate_povm`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PovmValidation {
    pub max_completeness_residual: f64,
    pub min_effect_eigenvalue: f64,
    pub pass: bool,
    pub tolerance: f64,
}

/// Checks a candidate effect list: every effect Hermitian and PSD within
/// `tolerance`, and the sum within `tolerance` of the identity in Frobenius
/// norm. Report-style, so a failing POVM yields `pass: false` rather than an
/// error; only structural problems (empty list, ragged dims, non-Hermitian
/// entries) are errors.
pub fn validate_povm(effects: &[ComplexMatrix], tolerance: f64) -> Result<PovmValidation> {
    let dim = match effects.first() {
        Some(e) if e.is_square() => e.rows(),
        _ => return Err(Error::InvalidPovm("no effects or non-square effect".into())),
    };
    if effects.iter().any(|e| e.rows() != dim || e.cols() != dim) {
        return Err(Error::InvalidPovm("effects of unequal dimension".into()));
    }
    let mut min_effect_eigenvalue = f64::INFINITY;
    let mut sum = ComplexMatrix::zeros(dim, dim);
    for e in effects {
        let check = e.is_psd(tolerance)?;
        min_effect_eigenvalue = min_effect_eigenvalue.min(check.min_eigenvalue);
        sum = sum.add(e);
    }
    let max_completeness_residual = sum.sub(&ComplexMatrix::identity(dim)).frobenius_norm();
    Ok(PovmValidation {
        max_completeness_residual,
        min_effect_eigenvalue,
        pass: max_completeness_residual <= tolerance && min_effect_eigenvalue >= -tolerance,
        tolerance,
    })
}

/// Born rule `P = Tr(ρ π)`, clamped to [0, 1].
///
/// The effect must be PSD and bounded by the identity within the
/// certification tolerance.
pub fn born_probability(state: &DensityOperator, effect: &ComplexMatrix) -> Result<f64> {
    if effect.rows() != state.dim() || !effect.is_square() {
        return Err(Error::DimensionMismatch(format!(
            "effect {}x{} on state of dim {}",
            effect.rows(),
            effect.cols(),
            state.dim()
        )));
    }
    let low = effect.is_psd(tol::CERTIFICATION)?;
    if !low.psd {
        return Err(Error::InvalidPovm(format!(
            "effect not PSD (min eigenvalue {:.3e})",
            low.min_eigenvalue
        )));
    }
    let high = ComplexMatrix::identity(effect.rows())
        .sub(effect)
        .is_psd(tol::CERTIFICATION)?;
    if !high.psd {
        return Err(Error::InvalidPovm(format!(
            "effect exceeds the identity (min eigenvalue of I-π is {:.3e})",
            high.min_eigenvalue
        )));
    }
    Ok(trace_product(state.matrix(), effect).clamp(0.0, 1.0))
}

/// `Re Tr(a b)` without forming the product matrix.
pub fn trace_product(a: &ComplexMatrix, b: &ComplexMatrix) -> f64 {
    debug_assert_eq!(a.cols(), b.rows());
    debug_assert_eq!(a.rows(), b.cols());
    let mut acc = Complex64::ZERO;
    for i in 0..a.rows() {
        for k in 0..a.cols() {
            acc += a[(i, k)] * b[(k, i)];
        }
    }
    acc.re
}

/// Born probabilities of every POVM outcome; sums to 1 within tolerance for a
/// valid POVM.
pub fn outcome_distribution(state: &DensityOperator, povm: &Povm) -> Result<Vec<f64>> {
    povm.effects()
        .iter()
        .map(|e| born_probability(state, e))
        .collect()
}
