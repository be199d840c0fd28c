//! Dense complex linear algebra over the small fixed dimensions (2..9) used
//! throughout the crate: Kronecker products, partial traces, Hermitian
//! eigendecomposition, and positive-semidefiniteness tests.
//!
//! Everything here is immutable after construction and pure, so values can be
//! shared freely across threads.

use nalgebra::DMatrix;
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// Tolerance hierarchy used across the crate.
pub mod tol {
    /// Exactness expected of hand-entered constructions (Gram matrices,
    /// closed-form operators).
    pub const CONSTRUCTION: f64 = 1e-12;
    /// Default tolerance for PSD and zero-eigenvalue certification.
    pub const CERTIFICATION: f64 = 1e-10;
    /// Rejection threshold on the anti-Hermitian part when constructing
    /// Hermitian-typed values; anything below is symmetrized away.
    pub const HERMITICITY_REJECT: f64 = 1e-8;
}

/// Shorthand complex constructor.
#[inline]
pub fn c64(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

/// One of the two parties sharing a bipartite system.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Party {
    A,
    B,
}

impl Party {
    pub fn other(self) -> Party {
        match self {
            Party::A => Party::B,
            Party::B => Party::A,
        }
    }
}

impl std::fmt::Display for Party {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Party::A => write!(f, "A"),
            Party::B => write!(f, "B"),
        }
    }
}

/// Dense complex matrix, row-major.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "MatrixJson", into = "MatrixJson")]
pub struct ComplexMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<Complex64>,
}

/// JSON shape for operators: row-major nested arrays of `[re, im]`.
type MatrixJson = Vec<Vec<[f64; 2]>>;

impl TryFrom<MatrixJson> for ComplexMatrix {
    type Error = Error;

    fn try_from(rows: MatrixJson) -> Result<Self> {
        let nrows = rows.len();
        if nrows == 0 {
            return Err(Error::ShapeMismatch("empty matrix".into()));
        }
        let ncols = rows[0].len();
        if ncols == 0 || rows.iter().any(|r| r.len() != ncols) {
            return Err(Error::ShapeMismatch("ragged or empty matrix rows".into()));
        }
        let entries = rows
            .iter()
            .flat_map(|r| r.iter().map(|&[re, im]| c64(re, im)))
            .collect();
        ComplexMatrix::new(nrows, ncols, entries)
    }
}

impl From<ComplexMatrix> for MatrixJson {
    fn from(m: ComplexMatrix) -> MatrixJson {
        (0..m.rows)
            .map(|i| (0..m.cols).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect())
            .collect()
    }
}

impl ComplexMatrix {
    /// Builds a matrix from row-major entries, rejecting NaN/Inf and count
    /// mismatches.
    pub fn new(rows: usize, cols: usize, entries: Vec<Complex64>) -> Result<Self> {
        if entries.len() != rows * cols {
            return Err(Error::ShapeMismatch(format!(
                "expected {}x{} = {} entries, got {}",
                rows,
                cols,
                rows * cols,
                entries.len()
            )));
        }
        if entries.iter().any(|z| !z.re.is_finite() || !z.im.is_finite()) {
            return Err(Error::NonFinite);
        }
        Ok(Self { rows, cols, entries })
    }

    pub fn zeros(rows: usize, cols: usize) -> Self {
        Self {
            rows,
            cols,
            entries: vec![Complex64::ZERO; rows * cols],
        }
    }

    pub fn identity(dim: usize) -> Self {
        let mut m = Self::zeros(dim, dim);
        for i in 0..dim {
            m[(i, i)] = Complex64::ONE;
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, mut f: impl FnMut(usize, usize) -> Complex64) -> Self {
        let mut entries = Vec::with_capacity(rows * cols);
        for i in 0..rows {
            for j in 0..cols {
                entries.push(f(i, j));
            }
        }
        Self { rows, cols, entries }
    }

    /// Real matrix from row-major f64 entries; panics on count mismatch.
    pub fn from_real(rows: usize, cols: usize, entries: &[f64]) -> Self {
        assert_eq!(entries.len(), rows * cols);
        Self {
            rows,
            cols,
            entries: entries.iter().map(|&x| c64(x, 0.0)).collect(),
        }
    }

    /// Rank-one outer product `v w†`.
    pub fn outer(v: &[Complex64], w: &[Complex64]) -> Self {
        Self::from_fn(v.len(), w.len(), |i, j| v[i] * w[j].conj())
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_square(&self) -> bool {
        self.rows == self.cols
    }

    pub fn entries(&self) -> &[Complex64] {
        &self.entries
    }

    pub fn transpose(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)])
    }

    /// Conjugate transpose.
    pub fn dagger(&self) -> Self {
        Self::from_fn(self.cols, self.rows, |i, j| self[(j, i)].conj())
    }

    pub fn scale(&self, s: Complex64) -> Self {
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self.entries.iter().map(|&z| z * s).collect(),
        }
    }

    pub fn scale_re(&self, s: f64) -> Self {
        self.scale(c64(s, 0.0))
    }

    pub fn add(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in add");
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a + b)
                .collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "shape mismatch in sub");
        Self {
            rows: self.rows,
            cols: self.cols,
            entries: self
                .entries
                .iter()
                .zip(&other.entries)
                .map(|(&a, &b)| a - b)
                .collect(),
        }
    }

    pub fn matmul(&self, other: &Self) -> Self {
        assert_eq!(self.cols, other.rows, "shape mismatch in matmul");
        let mut out = Self::zeros(self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self[(i, k)];
                if a == Complex64::ZERO {
                    continue;
                }
                for j in 0..other.cols {
                    out[(i, j)] += a * other[(k, j)];
                }
            }
        }
        out
    }

    /// Matrix-vector product.
    pub fn apply(&self, v: &[Complex64]) -> Vec<Complex64> {
        assert_eq!(self.cols, v.len(), "shape mismatch in apply");
        (0..self.rows)
            .map(|i| (0..self.cols).map(|j| self[(i, j)] * v[j]).sum())
            .collect()
    }

    pub fn trace(&self) -> Complex64 {
        assert!(self.is_square(), "trace of non-square matrix");
        (0..self.rows).map(|i| self[(i, i)]).sum()
    }

    pub fn frobenius_norm(&self) -> f64 {
        self.entries.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn max_abs(&self) -> f64 {
        self.entries.iter().map(|z| z.norm()).fold(0.0, f64::max)
    }

    /// Frobenius norm of the anti-Hermitian part `M - M†`.
    pub fn hermitian_residual(&self) -> f64 {
        assert!(self.is_square());
        self.sub(&self.dagger()).frobenius_norm()
    }

    pub fn is_hermitian(&self, tolerance: f64) -> bool {
        self.is_square() && self.hermitian_residual() <= tolerance
    }

    /// Hermitian part `(M + M†)/2`.
    pub fn symmetrized(&self) -> Self {
        self.add(&self.dagger()).scale_re(0.5)
    }

    /// Kronecker product; dimensions multiply.
    pub fn kron(&self, other: &Self) -> Self {
        let (ra, ca, rb, cb) = (self.rows, self.cols, other.rows, other.cols);
        Self::from_fn(ra * rb, ca * cb, |i, j| {
            self[(i / rb, j / cb)] * other[(i % rb, j % cb)]
        })
    }

    /// Traces out one party of an operator on a `dims.0 ⊗ dims.1` system,
    /// returning the reduced operator on the kept party.
    pub fn partial_trace(&self, dims: (usize, usize), keep: Party) -> Result<Self> {
        let (da, db) = dims;
        if !self.is_square() || self.rows != da * db {
            return Err(Error::DimensionMismatch(format!(
                "partial trace of {}x{} with dims {}x{}",
                self.rows, self.cols, da, db
            )));
        }
        let m = match keep {
            Party::A => Self::from_fn(da, da, |a, ap| {
                (0..db).map(|b| self[(a * db + b, ap * db + b)]).sum()
            }),
            Party::B => Self::from_fn(db, db, |b, bp| {
                (0..da).map(|a| self[(a * db + b, a * db + bp)]).sum()
            }),
        };
        Ok(m)
    }

    /// Extends an operator on one party to the joint space by tensoring with
    /// the identity on the other party.
    pub fn embed(&self, dims: (usize, usize), party: Party) -> Result<Self> {
        let own = match party {
            Party::A => dims.0,
            Party::B => dims.1,
        };
        if !self.is_square() || self.rows != own {
            return Err(Error::DimensionMismatch(format!(
                "embedding a {}x{} operator on party {} of a {}⊗{} system",
                self.rows, self.cols, party, dims.0, dims.1
            )));
        }
        Ok(match party {
            Party::A => self.kron(&Self::identity(dims.1)),
            Party::B => Self::identity(dims.0).kron(self),
        })
    }

    /// Eigendecomposition of a Hermitian matrix, eigenvalues ascending.
    ///
    /// The input must be Hermitian within `tol::CERTIFICATION`; the residual
    /// anti-Hermitian part is symmetrized away before solving. Eigenvector
    /// phases are fixed (first non-negligible component real positive) so the
    /// output is reproducible.
    pub fn eig_hermitian(&self) -> Result<EigenDecomposition> {
        if !self.is_square() {
            return Err(Error::DimensionMismatch("eigendecomposition of non-square matrix".into()));
        }
        let residual = self.hermitian_residual();
        if residual > tol::CERTIFICATION {
            return Err(Error::NonHermitian { residual });
        }
        let h = self.symmetrized();
        let n = h.rows;
        let dm = DMatrix::from_fn(n, n, |i, j| h[(i, j)]);
        let eig = dm.symmetric_eigen();

        let mut order: Vec<usize> = (0..n).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));

        let eigenvalues: Vec<f64> = order.iter().map(|&k| eig.eigenvalues[k]).collect();
        let eigenvectors: Vec<Vec<Complex64>> = order
            .iter()
            .map(|&k| {
                let col: Vec<Complex64> = (0..n).map(|i| eig.eigenvectors[(i, k)]).collect();
                fix_phase(col)
            })
            .collect();
        Ok(EigenDecomposition { eigenvalues, eigenvectors })
    }

    /// PSD test: true iff the smallest eigenvalue is `>= -tolerance`.
    pub fn is_psd(&self, tolerance: f64) -> Result<PsdCheck> {
        let eig = self.eig_hermitian()?;
        let min_eigenvalue = eig.eigenvalues[0];
        Ok(PsdCheck {
            psd: min_eigenvalue >= -tolerance,
            min_eigenvalue,
        })
    }

    /// Unit-norm eigenvector for the unique eigenvalue with `|λ| <= tolerance`.
    ///
    /// Errors if no eigenvalue lies within the tolerance or if the
    /// zero eigenspace is degenerate.
    pub fn zero_eigenvector(&self, tolerance: f64) -> Result<Vec<Complex64>> {
        let eig = self.eig_hermitian()?;
        let hits: Vec<usize> = (0..eig.eigenvalues.len())
            .filter(|&k| eig.eigenvalues[k].abs() <= tolerance)
            .collect();
        match hits.len() {
            0 => {
                let closest = eig
                    .eigenvalues
                    .iter()
                    .copied()
                    .min_by(|a, b| a.abs().total_cmp(&b.abs()))
                    .unwrap_or(f64::NAN);
                Err(Error::NoZeroEigenvalue { closest })
            }
            1 => Ok(eig.eigenvectors[hits[0]].clone()),
            n => Err(Error::DegenerateKernel { count: n }),
        }
    }

    /// Positive-semidefinite square root, clamping tiny negative eigenvalues
    /// to zero.
    pub fn sqrt_psd(&self) -> Result<Self> {
        let eig = self.eig_hermitian()?;
        let n = self.rows;
        let mut out = Self::zeros(n, n);
        for (lambda, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            if *lambda <= 0.0 {
                continue;
            }
            let s = lambda.sqrt();
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * s;
                }
            }
        }
        Ok(out)
    }

    /// Inverse square root on the range, treating eigenvalues below
    /// `rel_cutoff * λ_max` as zero.
    pub fn inv_sqrt_psd(&self, rel_cutoff: f64) -> Result<Self> {
        let eig = self.eig_hermitian()?;
        let n = self.rows;
        let lambda_max = eig.eigenvalues.last().copied().unwrap_or(0.0).max(0.0);
        let cutoff = lambda_max * rel_cutoff;
        let mut out = Self::zeros(n, n);
        for (lambda, v) in eig.eigenvalues.iter().zip(&eig.eigenvectors) {
            if *lambda <= cutoff {
                continue;
            }
            let s = 1.0 / lambda.sqrt();
            for i in 0..n {
                for j in 0..n {
                    out[(i, j)] += v[i] * v[j].conj() * s;
                }
            }
        }
        Ok(out)
    }
}

impl std::ops::Index<(usize, usize)> for ComplexMatrix {
    type Output = Complex64;

    #[inline]
    fn index(&self, (i, j): (usize, usize)) -> &Complex64 {
        &self.entries[i * self.cols + j]
    }
}

impl std::ops::IndexMut<(usize, usize)> for ComplexMatrix {
    #[inline]
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut Complex64 {
        &mut self.entries[i * self.cols + j]
    }
}

/// Fixes the global phase so the first component with modulus above 1e-8 is
/// real and positive.
pub fn fix_phase(mut v: Vec<Complex64>) -> Vec<Complex64> {
    if let Some(&lead) = v.iter().find(|z| z.norm() > 1e-8) {
        let phase = lead.conj() / lead.norm();
        for z in &mut v {
            *z *= phase;
        }
    }
    v
}

/// Result of a Hermitian eigendecomposition; eigenvalues ascending,
/// eigenvectors unit-norm and mutually orthogonal.
#[derive(Debug, Clone)]
pub struct EigenDecomposition {
    pub eigenvalues: Vec<f64>,
    pub eigenvectors: Vec<Vec<Complex64>>,
}

impl EigenDecomposition {
    /// Rebuilds `Σ λ_k v_k v_k†`, mostly useful for verifying accuracy.
    pub fn reconstruct(&self) -> ComplexMatrix {
        let n = self.eigenvalues.len();
        let mut m = ComplexMatrix::zeros(n, n);
        for (lambda, v) in self.eigenvalues.iter().zip(&self.eigenvectors) {
            for i in 0..n {
                for j in 0..n {
                    m[(i, j)] += v[i] * v[j].conj() * *lambda;
                }
            }
        }
        m
    }
}

/// Outcome of [`ComplexMatrix::is_psd`].
#[derive(Debug, Clone, Copy)]
pub struct PsdCheck {
    pub psd: bool,
    pub min_eigenvalue: f64,
}

/// Inner product `⟨v|w⟩` with the physics convention (conjugate-linear in the
/// first argument).
pub fn inner(v: &[Complex64], w: &[Complex64]) -> Complex64 {
    assert_eq!(v.len(), w.len());
    v.iter().zip(w).map(|(a, b)| a.conj() * b).sum()
}

pub fn norm(v: &[Complex64]) -> f64 {
    v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sigma_x() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 1.0, 0.0])
    }

    fn sigma_z() -> ComplexMatrix {
        ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, -1.0])
    }

    #[test]
    fn new_rejects_bad_shapes_and_nonfinite() {
        assert!(ComplexMatrix::new(2, 2, vec![Complex64::ZERO; 3]).is_err());
        let mut e = vec![Complex64::ZERO; 4];
        e[2] = c64(f64::NAN, 0.0);
        assert!(matches!(ComplexMatrix::new(2, 2, e), Err(Error::NonFinite)));
    }

    #[test]
    fn kron_identity() {
        let i2 = ComplexMatrix::identity(2);
        assert_eq!(i2.kron(&i2), ComplexMatrix::identity(4));
    }

    #[test]
    fn kron_basis_projectors() {
        // |0><0| ⊗ |1><1| has a single 1 at (1,1)
        let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let p1 = ComplexMatrix::from_real(2, 2, &[0.0, 0.0, 0.0, 1.0]);
        let k = p0.kron(&p1);
        for i in 0..4 {
            for j in 0..4 {
                let expect = if (i, j) == (1, 1) { 1.0 } else { 0.0 };
                assert!((k[(i, j)] - c64(expect, 0.0)).norm() < 1e-15);
            }
        }
    }

    #[test]
    fn kron_pauli_spectrum() {
        // σ_z ⊗ σ_x has eigenvalues {-1, -1, 1, 1}
        let k = sigma_z().kron(&sigma_x());
        let eig = k.eig_hermitian().unwrap();
        let expect = [-1.0, -1.0, 1.0, 1.0];
        for (got, want) in eig.eigenvalues.iter().zip(expect) {
            assert!((got - want).abs() < 1e-12);
        }
    }

    #[test]
    fn partial_trace_product_state() {
        // Tr_B(|0><0| ⊗ |+><+|) = |0><0|
        let p0 = ComplexMatrix::from_real(2, 2, &[1.0, 0.0, 0.0, 0.0]);
        let plus = ComplexMatrix::from_real(2, 2, &[0.5, 0.5, 0.5, 0.5]);
        let joint = p0.kron(&plus);
        let red = joint.partial_trace((2, 2), Party::A).unwrap();
        assert!(red.sub(&p0).frobenius_norm() < 1e-14);
    }

    #[test]
    fn partial_trace_maximally_mixed() {
        let m = ComplexMatrix::identity(4).scale_re(0.25);
        let red = m.partial_trace((2, 2), Party::A).unwrap();
        assert!(red.sub(&ComplexMatrix::identity(2).scale_re(0.5)).frobenius_norm() < 1e-15);
    }

    #[test]
    fn partial_trace_dimension_mismatch() {
        let m = ComplexMatrix::identity(3);
        assert!(m.partial_trace((2, 2), Party::A).is_err());
    }

    #[test]
    fn eig_diag_sorted_ascending() {
        let m = ComplexMatrix::from_real(3, 3, &[3.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let eig = m.eig_hermitian().unwrap();
        assert!((eig.eigenvalues[0] - 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 2.0).abs() < 1e-14);
        assert!((eig.eigenvalues[2] - 3.0).abs() < 1e-14);
    }

    #[test]
    fn eig_pauli_x() {
        let eig = sigma_x().eig_hermitian().unwrap();
        assert!((eig.eigenvalues[0] + 1.0).abs() < 1e-14);
        assert!((eig.eigenvalues[1] - 1.0).abs() < 1e-14);
        // eigenvectors are |∓> with the leading component real positive
        let s = 1.0 / 2f64.sqrt();
        let minus = &eig.eigenvectors[0];
        assert!((minus[0] - c64(s, 0.0)).norm() < 1e-12);
        assert!((minus[1] - c64(-s, 0.0)).norm() < 1e-12);
        let plus = &eig.eigenvectors[1];
        assert!((plus[0] - c64(s, 0.0)).norm() < 1e-12);
        assert!((plus[1] - c64(s, 0.0)).norm() < 1e-12);
    }

    #[test]
    fn eig_rejects_non_hermitian() {
        let m = ComplexMatrix::from_real(2, 2, &[0.0, 1.0, 0.0, 0.0]);
        assert!(matches!(m.eig_hermitian(), Err(Error::NonHermitian { .. })));
    }

    #[test]
    fn is_psd_examples() {
        let ok = ComplexMatrix::identity(3).is_psd(1e-10).unwrap();
        assert!(ok.psd);
        assert!((ok.min_eigenvalue - 1.0).abs() < 1e-14);

        let bad = sigma_z().is_psd(1e-10).unwrap();
        assert!(!bad.psd);
        assert!((bad.min_eigenvalue + 1.0).abs() < 1e-14);
    }

    #[test]
    fn zero_eigenvector_diag() {
        let m = ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 2.0]);
        let v = m.zero_eigenvector(1e-10).unwrap();
        assert!((v[0] - c64(1.0, 0.0)).norm() < 1e-12);
        assert!(v[1].norm() < 1e-12 && v[2].norm() < 1e-12);
    }

    #[test]
    fn zero_eigenvector_absent() {
        let m = ComplexMatrix::from_real(3, 3, &[1.0, 0.0, 0.0, 0.0, 2.0, 0.0, 0.0, 0.0, 3.0]);
        assert!(matches!(
            m.zero_eigenvector(1e-10),
            Err(Error::NoZeroEigenvalue { .. })
        ));
    }

    #[test]
    fn zero_eigenvector_degenerate() {
        let m = ComplexMatrix::from_real(3, 3, &[0.0; 9]);
        assert!(matches!(
            m.zero_eigenvector(1e-10),
            Err(Error::DegenerateKernel { count: 3 })
        ));
    }

    #[test]
    fn embed_party_b() {
        let e = sigma_x().embed((3, 2), Party::B).unwrap();
        assert_eq!(e.rows(), 6);
        assert!((e[(0, 1)] - c64(1.0, 0.0)).norm() < 1e-15);
        assert!(e[(0, 2)].norm() < 1e-15);
    }

    #[test]
    fn matrix_json_round_trip() {
        let m = ComplexMatrix::from_fn(2, 3, |i, j| c64(i as f64, j as f64));
        let s = serde_json::to_string(&m).unwrap();
        let back: ComplexMatrix = serde_json::from_str(&s).unwrap();
        assert_eq!(m, back);
    }
}
