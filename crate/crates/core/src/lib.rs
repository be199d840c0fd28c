//! Minimum-error discrimination of bipartite product-state ensembles.
//!
//! The crate provides, in rough dependency order:
//!
//! - [`matrix`]: dense complex linear algebra on small dimensions (Kronecker
//!   products, partial traces, Hermitian eigendecomposition, PSD tests);
//! - [`model`]: kets, density operators, ensembles with priors, POVMs, and
//!   the Born rule, together with their JSON encodings;
//! - [`catalog`]: the named state families studied here — a two-qubit
//!   product basis built on BB84 states, a 2⊗4 product basis, and the nine
//!   domino states — plus their subset structure and effective operators;
//! - [`helstrom`]: success-probability figures of merit and the Helstrom
//!   optimality conditions for minimum-error measurements;
//! - [`optimizer`]: a fixed-point iteration for optimal POVMs, a projective
//!   grid-search oracle for qubits, and the symmetry-constrained construction
//!   of the optimal 8-outcome domino measurement;
//! - [`locc`]: finite trees of local measurements with classical
//!   communication, evaluated exactly or by seeded Monte-Carlo sampling.

use thiserror::Error as ThisError;

pub mod catalog;
pub mod helstrom;
pub mod locc;
pub mod matrix;
pub mod model;
pub mod optimizer;

pub use matrix::{c64, ComplexMatrix, EigenDecomposition, Party};
pub use model::{DensityOperator, Ensemble, EnsembleState, Ket, Povm};

/// Crate-wide error type.
#[derive(Debug, Clone, ThisError)]
pub enum Error {
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("non-finite entry (NaN or Inf)")]
    NonFinite,

    #[error("matrix is not Hermitian (anti-Hermitian residual {residual:.3e})")]
    NonHermitian { residual: f64 },

    #[error("vector norm {norm} too far from 1 to renormalize")]
    NotNormalized { norm: f64 },

    #[error("no zero eigenvalue within tolerance (closest {closest:.3e})")]
    NoZeroEigenvalue { closest: f64 },

    #[error("zero eigenspace is degenerate ({count} eigenvalues within tolerance)")]
    DegenerateKernel { count: usize },

    #[error("invalid density operator: {0}")]
    InvalidDensity(String),

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("invalid POVM: {0}")]
    InvalidPovm(String),

    #[error("invalid protocol: {0}")]
    InvalidProtocol(String),

    #[error("unknown guess label {0:?}")]
    UnknownGuess(String),

    #[error("classical-side states are not block-diagonal in the measurement basis (residual {residual:.3e})")]
    NotClassicallyDiagonal { residual: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
