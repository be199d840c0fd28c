//! The named state families studied by this crate, constructed exactly:
//!
//! - `gv`: a two-qubit orthonormal product basis whose Bob components are the
//!   four BB84 states, perfectly distinguishable one-way A→B but not B→A;
//! - `twofour`: a 2⊗4 orthonormal product basis that needs two rounds of
//!   classical communication for perfect discrimination;
//! - `domino`: the nine domino states, an orthonormal 3⊗3 product basis that
//!   no amount of classical communication distinguishes perfectly;
//!
//! together with the Breidbart basis, the one-sided-distinguishable subset
//! families of each ensemble, the domino row mixtures ρ_j, the reduced
//! operators σ_k with their symmetry unitaries U and V, and the effective
//! operators A_g induced by guess functions on a classical party.

use serde::{Deserialize, Serialize};

use crate::matrix::{tol, ComplexMatrix, Party};
use crate::model::{DensityOperator, Ensemble, EnsembleState, Ket};
use crate::{Error, Result};

/// Structured state identifier `(i, j)` for a basis state `psi_ij`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct StateLabel {
    pub i: usize,
    pub j: usize,
}

impl StateLabel {
    pub fn new(i: usize, j: usize) -> Self {
        Self { i, j }
    }
}

impl std::fmt::Display for StateLabel {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "psi_{}{}", self.i, self.j)
    }
}

/// A labelled bipartite product state `|a⟩_A ⊗ |b⟩_B`.
#[derive(Debug, Clone)]
pub struct ProductState {
    pub label: StateLabel,
    pub alice: Ket,
    pub bob: Ket,
}

impl ProductState {
    fn new(i: usize, j: usize, alice: Ket, bob: Ket) -> Self {
        Self {
            label: StateLabel::new(i, j),
            alice,
            bob,
        }
    }

    pub fn joint(&self) -> Ket {
        self.alice.tensor(&self.bob)
    }

    /// The component held by the given party.
    pub fn component(&self, party: Party) -> &Ket {
        match party {
            Party::A => &self.alice,
            Party::B => &self.bob,
        }
    }
}

/// A catalog ensemble kept in product form, so one-sided structure stays
/// accessible.
#[derive(Debug, Clone)]
pub struct ProductEnsemble {
    pub name: &'static str,
    pub dims: (usize, usize),
    pub states: Vec<ProductState>,
}

impl ProductEnsemble {
    /// Equiprobable [`Ensemble`] over the joint states, labelled `psi_ij`.
    pub fn to_ensemble(&self) -> Ensemble {
        let n = self.states.len();
        Ensemble::new(
            vec![self.dims.0, self.dims.1],
            self.states
                .iter()
                .map(|s| EnsembleState::Pure(s.joint()))
                .collect(),
            vec![1.0 / n as f64; n],
            self.states.iter().map(|s| s.label.to_string()).collect(),
        )
        .expect("catalog ensemble is valid by construction")
    }

    pub fn state(&self, label: StateLabel) -> Option<&ProductState> {
        self.states.iter().find(|s| s.label == label)
    }
}

fn k(d: usize, i: usize) -> Ket {
    Ket::basis(d, i)
}

fn kp(d: usize, i: usize, j: usize) -> Ket {
    Ket::two_term(d, i, j, 1.0)
}

fn km(d: usize, i: usize, j: usize) -> Ket {
    Ket::two_term(d, i, j, -1.0)
}

/// The two-qubit product basis: `psi_00 = |0⟩|0⟩`, `psi_01 = |0⟩|1⟩`,
/// `psi_10 = |1⟩|0+1⟩`, `psi_11 = |1⟩|0-1⟩`.
pub fn gv_states() -> ProductEnsemble {
    ProductEnsemble {
        name: "gv",
        dims: (2, 2),
        states: vec![
            ProductState::new(0, 0, k(2, 0), k(2, 0)),
            ProductState::new(0, 1, k(2, 0), k(2, 1)),
            ProductState::new(1, 0, k(2, 1), kp(2, 0, 1)),
            ProductState::new(1, 1, k(2, 1), km(2, 0, 1)),
        ],
    }
}

/// Equiprobable ensemble over [`gv_states`].
pub fn gv_ensemble() -> Ensemble {
    gv_states().to_ensemble()
}

/// The Breidbart basis, bisecting the z- and x-bases:
/// `|φ0⟩ = cos(π/8)|0⟩ + sin(π/8)|1⟩`, `|φ1⟩ = sin(π/8)|0⟩ - cos(π/8)|1⟩`.
pub fn breidbart_basis() -> (Ket, Ket) {
    let c = (std::f64::consts::PI / 8.0).cos();
    let s = (std::f64::consts::PI / 8.0).sin();
    (
        Ket::from_real(&[c, s]).unwrap(),
        Ket::from_real(&[s, -c]).unwrap(),
    )
}

/// A 2⊗4 orthonormal product basis which is perfectly distinguishable with
/// two rounds of classical communication but not with one-way communication.
pub fn twofour_states() -> ProductEnsemble {
    ProductEnsemble {
        name: "twofour",
        dims: (2, 4),
        states: vec![
            ProductState::new(0, 0, k(2, 0), k(4, 0)),
            ProductState::new(0, 1, k(2, 0), k(4, 1)),
            ProductState::new(0, 2, kp(2, 0, 1), k(4, 2)),
            ProductState::new(0, 3, kp(2, 0, 1), k(4, 3)),
            ProductState::new(1, 0, k(2, 1), kp(4, 0, 1)),
            ProductState::new(1, 1, k(2, 1), km(4, 0, 1)),
            ProductState::new(1, 2, km(2, 0, 1), kp(4, 2, 3)),
            ProductState::new(1, 3, km(2, 0, 1), km(4, 2, 3)),
        ],
    }
}

/// Equiprobable ensemble over [`twofour_states`].
pub fn twofour_ensemble() -> Ensemble {
    twofour_states().to_ensemble()
}

/// The nine domino states on a 3⊗3 system.
pub fn domino_states() -> ProductEnsemble {
    ProductEnsemble {
        name: "domino",
        dims: (3, 3),
        states: vec![
            ProductState::new(0, 0, k(3, 0), km(3, 0, 1)),
            ProductState::new(0, 1, k(3, 0), kp(3, 0, 1)),
            ProductState::new(0, 2, km(3, 0, 1), k(3, 2)),
            ProductState::new(1, 0, kp(3, 1, 2), k(3, 0)),
            ProductState::new(1, 1, k(3, 1), k(3, 1)),
            ProductState::new(1, 2, kp(3, 0, 1), k(3, 2)),
            ProductState::new(2, 0, km(3, 1, 2), k(3, 0)),
            ProductState::new(2, 1, k(3, 2), km(3, 1, 2)),
            ProductState::new(2, 2, k(3, 2), kp(3, 1, 2)),
        ],
    }
}

/// Equiprobable ensemble over [`domino_states`].
pub fn domino_ensemble() -> Ensemble {
    domino_states().to_ensemble()
}

/// A named subset of a catalog ensemble's states.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Subset {
    pub name: String,
    pub members: Vec<StateLabel>,
}

/// Subsets of one ensemble whose states are perfectly distinguishable from
/// the components on a single side.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SubsetFamily {
    pub name: String,
    pub ensemble: &'static str,
    /// The side on which each subset's components are pairwise orthogonal.
    pub distinguishable_on: Party,
    pub subsets: Vec<Subset>,
}

impl SubsetFamily {
    /// Checks that each referenced label exists and that each subset's
    /// components on `distinguishable_on` are pairwise orthogonal within
    /// the construction tolerance.
    pub fn verify(&self, states: &ProductEnsemble) -> Result<()> {
        for subset in &self.subsets {
            let members: Vec<&ProductState> = subset
                .members
                .iter()
                .map(|&l| {
                    states
                        .state(l)
                        .ok_or_else(|| Error::UnknownGuess(l.to_string()))
                })
                .collect::<Result<_>>()?;
            for (a, sa) in members.iter().enumerate() {
                for sb in members.iter().skip(a + 1) {
                    let olap = sa
                        .component(self.distinguishable_on)
                        .inner(sb.component(self.distinguishable_on))
                        .norm();
                    if olap > tol::CONSTRUCTION {
                        return Err(Error::InvalidEnsemble(format!(
                            "subset {} of {} not orthogonal on side {} (overlap {olap:.3e})",
                            subset.name, self.name, self.distinguishable_on
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// The four two-state subsets of the `gv` basis that are perfectly
/// distinguishable on Alice's side:
/// `S_00 = {psi_00, psi_10}`, `S_01 = {psi_00, psi_11}`,
/// `S_10 = {psi_01, psi_10}`, `S_11 = {psi_01, psi_11}`.
pub fn gv_subsets() -> SubsetFamily {
    let pair = |name: &str, a: (usize, usize), b: (usize, usize)| Subset {
        name: name.to_string(),
        members: vec![StateLabel::new(a.0, a.1), StateLabel::new(b.0, b.1)],
    };
    let family = SubsetFamily {
        name: "gv-subsets".to_string(),
        ensemble: "gv",
        distinguishable_on: Party::A,
        subsets: vec![
            pair("S_00", (0, 0), (1, 0)),
            pair("S_01", (0, 0), (1, 1)),
            pair("S_10", (0, 1), (1, 0)),
            pair("S_11", (0, 1), (1, 1)),
        ],
    };
    family
        .verify(&gv_states())
        .expect("gv subsets are one-side orthogonal by construction");
    family
}

/// Total function from one party's classical outcome to a row index.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct GuessFunction {
    map: Vec<usize>,
}

impl GuessFunction {
    pub fn new(map: Vec<usize>, n_rows: usize) -> Result<Self> {
        if map.iter().any(|&r| r >= n_rows) {
            return Err(Error::InvalidEnsemble(format!(
                "guess function {map:?} maps outside {n_rows} rows"
            )));
        }
        Ok(Self { map })
    }

    pub fn outcomes(&self) -> usize {
        self.map.len()
    }

    pub fn apply(&self, outcome: usize) -> usize {
        self.map[outcome]
    }

    pub fn values(&self) -> &[usize] {
        &self.map
    }
}

impl std::fmt::Display for GuessFunction {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let parts: Vec<String> = self.map.iter().map(|r| r.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

/// The domino subset family together with its guess-function correspondence.
#[derive(Debug, Clone)]
pub struct DominoSubsets {
    pub family: SubsetFamily,
    /// `guess_functions[k]` maps Bob's z-basis outcome to the row index
    /// identified when Alice's outcome is `S_k`.
    pub guess_functions: Vec<GuessFunction>,
}

/// The eight three-state subsets of the domino basis that are perfectly
/// distinguishable on system B alone, with each subset's induced guess
/// function `g(b) = row of the member whose B component overlaps |b⟩`.
pub fn domino_subsets() -> DominoSubsets {
    let triple = |name: &str, a: (usize, usize), b: (usize, usize), c: (usize, usize)| Subset {
        name: name.to_string(),
        members: vec![
            StateLabel::new(a.0, a.1),
            StateLabel::new(b.0, b.1),
            StateLabel::new(c.0, c.1),
        ],
    };
    let family = SubsetFamily {
        name: "domino-subsets".to_string(),
        ensemble: "domino",
        distinguishable_on: Party::B,
        subsets: vec![
            triple("S_0", (0, 0), (0, 1), (0, 2)),
            triple("S_1", (0, 0), (0, 1), (1, 2)),
            triple("S_2", (1, 0), (2, 1), (2, 2)),
            triple("S_3", (2, 0), (2, 1), (2, 2)),
            triple("S_4", (1, 0), (1, 1), (0, 2)),
            triple("S_5", (1, 0), (1, 1), (1, 2)),
            triple("S_6", (2, 0), (1, 1), (0, 2)),
            triple("S_7", (2, 0), (1, 1), (1, 2)),
        ],
    };
    let states = domino_states();
    family
        .verify(&states)
        .expect("domino subsets are B-side orthogonal by construction");

    let guess_functions = family
        .subsets
        .iter()
        .map(|s| {
            let map = (0..3)
                .map(|b| {
                    let eb = Ket::basis(3, b);
                    let rows: Vec<usize> = s
                        .members
                        .iter()
                        .filter(|&&l| {
                            states
                                .state(l)
                                .map(|ps| ps.bob.inner(&eb).norm() > 1e-9)
                                .unwrap_or(false)
                        })
                        .map(|l| l.i)
                        .collect();
                    let row = rows[0];
                    assert!(
                        rows.iter().all(|&r| r == row),
                        "subset {} has mixed rows overlapping |{}⟩",
                        s.name,
                        b
                    );
                    row
                })
                .collect();
            GuessFunction::new(map, 3).expect("row indices are < 3")
        })
        .collect::<Vec<_>>();

    // frozen correspondence, re-derived above on every construction
    let expected: [[usize; 3]; 8] = [
        [0, 0, 0],
        [0, 0, 1],
        [1, 2, 2],
        [2, 2, 2],
        [1, 1, 0],
        [1, 1, 1],
        [2, 1, 0],
        [2, 1, 1],
    ];
    for (g, want) in guess_functions.iter().zip(expected) {
        assert_eq!(g.values(), want, "domino guess-function table drifted");
    }

    DominoSubsets { family, guess_functions }
}

/// The equiprobable row mixtures `ρ_j = (1/3) Σ_k |psi_jk⟩⟨psi_jk|` of the
/// domino basis, labelled `rho_0`, `rho_1`, `rho_2`.
pub fn domino_row_mixtures() -> Ensemble {
    let states = domino_states();
    let rows: Vec<EnsembleState> = (0..3)
        .map(|i| {
            let kets: Vec<Ket> = states
                .states
                .iter()
                .filter(|s| s.label.i == i)
                .map(|s| s.joint())
                .collect();
            EnsembleState::Mixed(
                DensityOperator::uniform_mixture(&kets).expect("row mixture is a valid state"),
            )
        })
        .collect();
    Ensemble::new(
        vec![3, 3],
        rows,
        vec![1.0 / 3.0; 3],
        (0..3).map(|i| format!("rho_{i}")).collect(),
    )
    .expect("row-mixture ensemble is valid by construction")
}

/// The symmetry unitaries of the domino subset structure:
/// `U = -|0⟩⟨0| + |1⟩⟨1| + |2⟩⟨2|` and `V = |0⟩⟨2| + |1⟩⟨1| + |2⟩⟨0|`.
pub fn symmetry_unitaries() -> (ComplexMatrix, ComplexMatrix) {
    let u = ComplexMatrix::from_real(3, 3, &[-1.0, 0.0, 0.0, 0.0, 1.0, 0.0, 0.0, 0.0, 1.0]);
    let v = ComplexMatrix::from_real(3, 3, &[0.0, 0.0, 1.0, 0.0, 1.0, 0.0, 1.0, 0.0, 0.0]);
    (u, v)
}

/// The reduced subset states
/// `σ_k = Tr_B[(1/3) Σ_{ψ ∈ S_k} |ψ⟩⟨ψ|]` on Alice's three-level system.
pub fn sigma_operators() -> Vec<ComplexMatrix> {
    let states = domino_states();
    let subsets = domino_subsets();
    subsets
        .family
        .subsets
        .iter()
        .map(|s| {
            let mut acc = ComplexMatrix::zeros(9, 9);
            for &l in &s.members {
                let joint = states.state(l).expect("verified label").joint();
                acc = acc.add(&joint.projector());
            }
            acc.scale_re(1.0 / 3.0)
                .partial_trace((3, 3), Party::A)
                .expect("9x9 operator traces to 3x3")
        })
        .collect()
}

/// The σ_k ensemble with uniform priors 1/8, as a discrimination problem on
/// Alice's side alone.
pub fn sigma_ensemble() -> Ensemble {
    let states: Vec<EnsembleState> = sigma_operators()
        .into_iter()
        .map(|m| {
            EnsembleState::Mixed(DensityOperator::from_matrix(m).expect("σ_k is a valid state"))
        })
        .collect();
    Ensemble::new(
        vec![3],
        states,
        vec![1.0 / 8.0; 8],
        (0..8).map(|kk| format!("sigma_{kk}")).collect(),
    )
    .expect("σ ensemble is valid by construction")
}

/// The binary mixture problem faced by Bob in the backward `gv` protocol:
/// `τ_0 = (|0⟩⟨0| + |+⟩⟨+|)/2` vs `τ_1 = (|1⟩⟨1| + |-⟩⟨-|)/2`, priors 1/2.
pub fn tau_ensemble() -> Ensemble {
    let tau0 = DensityOperator::uniform_mixture(&[k(2, 0), kp(2, 0, 1)]).unwrap();
    let tau1 = DensityOperator::uniform_mixture(&[k(2, 1), km(2, 0, 1)]).unwrap();
    Ensemble::new(
        vec![2],
        vec![EnsembleState::Mixed(tau0), EnsembleState::Mixed(tau1)],
        vec![0.5, 0.5],
        vec!["S_00".to_string(), "S_11".to_string()],
    )
    .expect("τ ensemble is valid by construction")
}

/// Effective operators `A_g` on the non-classical party, one per total guess
/// function `g: outcome → row`.
///
/// Requires every ensemble state to be block-diagonal across the classical
/// party's computational basis (within the certification tolerance); then
/// `A_g = Σ_b p_{g(b)} ⟨b| ρ_{g(b)} |b⟩`. Functions are enumerated with
/// `g(0)` as the most significant digit, so for three outcomes and three rows
/// the order is `(0,0,0), (0,0,1), ..., (2,2,2)`.
pub fn effective_guess_operators(
    ensemble: &Ensemble,
    classical: Party,
) -> Result<Vec<(GuessFunction, ComplexMatrix)>> {
    let (da, db) = ensemble.bipartite_dims()?;
    let (d_classical, d_other) = match classical {
        Party::A => (da, db),
        Party::B => (db, da),
    };
    let n_rows = ensemble.len();

    // blocks[j][b] = <b| rho_j |b> on the other party, after checking the
    // off-diagonal blocks vanish
    let mut blocks: Vec<Vec<ComplexMatrix>> = Vec::with_capacity(n_rows);
    let mut worst_off_diagonal: f64 = 0.0;
    for state in ensemble.states() {
        let m = state.density_matrix();
        let block = |b: usize, bp: usize| -> ComplexMatrix {
            ComplexMatrix::from_fn(d_other, d_other, |x, xp| {
                let (row, col) = match classical {
                    Party::A => (b * db + x, bp * db + xp),
                    Party::B => (x * db + b, xp * db + bp),
                };
                m[(row, col)]
            })
        };
        for b in 0..d_classical {
            for bp in 0..d_classical {
                if b != bp {
                    worst_off_diagonal = worst_off_diagonal.max(block(b, bp).frobenius_norm());
                }
            }
        }
        blocks.push((0..d_classical).map(|b| block(b, b)).collect());
    }
    if worst_off_diagonal > tol::CERTIFICATION {
        return Err(Error::NotClassicallyDiagonal {
            residual: worst_off_diagonal,
        });
    }

    let count = n_rows.pow(d_classical as u32);
    let mut out = Vec::with_capacity(count);
    for t in 0..count {
        let mut map = vec![0usize; d_classical];
        let mut rest = t;
        for b in (0..d_classical).rev() {
            map[b] = rest % n_rows;
            rest /= n_rows;
        }
        let mut a_g = ComplexMatrix::zeros(d_other, d_other);
        for (b, &row) in map.iter().enumerate() {
            a_g = a_g.add(&blocks[row][b].scale_re(ensemble.priors()[row]));
        }
        out.push((GuessFunction::new(map, n_rows)?, a_g));
    }
    Ok(out)
}

/// A discrimination problem the CLI can run by name. `objective_scale`
/// converts the ensemble's bare success probability into the figure of merit
/// of the underlying subset-identification task (1 when they coincide).
#[derive(Debug, Clone)]
pub struct NamedProblem {
    pub name: &'static str,
    pub description: &'static str,
    pub ensemble: Ensemble,
    pub objective_scale: f64,
}

/// All ensembles and derived discrimination problems addressable by name.
pub fn named_problems() -> Vec<NamedProblem> {
    let mut problems = vec![
        NamedProblem {
            name: "gv",
            description: "two-qubit product basis (4 equiprobable pure states)",
            ensemble: gv_ensemble(),
            objective_scale: 1.0,
        },
        NamedProblem {
            name: "twofour",
            description: "2x4 product basis (8 equiprobable pure states)",
            ensemble: twofour_ensemble(),
            objective_scale: 1.0,
        },
        NamedProblem {
            name: "domino",
            description: "domino states (9 equiprobable pure states on 3x3)",
            ensemble: domino_ensemble(),
            objective_scale: 1.0,
        },
        NamedProblem {
            name: "domino-rows",
            description: "domino row mixtures rho_0..rho_2 (equiprobable)",
            ensemble: domino_row_mixtures(),
            objective_scale: 1.0,
        },
        NamedProblem {
            name: "gv-bob-subsets",
            description: "Bob-side subset discrimination tau_0 vs tau_1 for the gv basis",
            ensemble: tau_ensemble(),
            objective_scale: 1.0,
        },
        NamedProblem {
            name: "domino-sigma",
            description: "Alice-side subset states sigma_0..sigma_7, priors 1/8 (success x 8/3)",
            ensemble: sigma_ensemble(),
            objective_scale: 8.0 / 3.0,
        },
    ];

    // the 27-operator Alice-side problem induced by the row mixtures
    let a_gs = effective_guess_operators(&domino_row_mixtures(), Party::B)
        .expect("row mixtures are Bob-side diagonal");
    let total: f64 = a_gs.iter().map(|(_, a)| a.trace().re).sum();
    let states: Vec<EnsembleState> = a_gs
        .iter()
        .map(|(_, a)| {
            EnsembleState::Mixed(
                DensityOperator::from_matrix(a.scale_re(1.0 / a.trace().re))
                    .expect("A_g normalizes to a valid state"),
            )
        })
        .collect();
    let priors: Vec<f64> = a_gs.iter().map(|(_, a)| a.trace().re / total).collect();
    let labels: Vec<String> = a_gs.iter().map(|(g, _)| format!("g_{g}")).collect();
    problems.push(NamedProblem {
        name: "domino-rows-alice",
        description: "all 27 Alice-side guess-function operators A_g (success x 9)",
        ensemble: Ensemble::new(vec![3], states, priors, labels)
            .expect("A_g ensemble is valid by construction"),
        objective_scale: total,
    });
    problems
}

/// Looks up a named problem; `None` for unknown names.
pub fn problem(name: &str) -> Option<NamedProblem> {
    named_problems().into_iter().find(|p| p.name == name)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::c64;

    fn assert_gram_identity(states: &ProductEnsemble) {
        let kets: Vec<Ket> = states.states.iter().map(|s| s.joint()).collect();
        for (a, ka) in kets.iter().enumerate() {
            for (b, kb) in kets.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                let got = ka.inner(kb);
                assert!(
                    (got - c64(want, 0.0)).norm() < tol::CONSTRUCTION,
                    "Gram({a},{b}) = {got} in {}",
                    states.name
                );
            }
        }
    }

    #[test]
    fn gv_gram_is_identity() {
        assert_gram_identity(&gv_states());
    }

    #[test]
    fn twofour_gram_is_identity() {
        assert_gram_identity(&twofour_states());
    }

    #[test]
    fn domino_gram_is_identity() {
        assert_gram_identity(&domino_states());
    }

    #[test]
    fn gv_alice_components_are_z_basis() {
        let states = gv_states();
        for s in &states.states {
            let want = Ket::basis(2, s.label.i);
            assert!((s.alice.inner(&want).norm() - 1.0).abs() < 1e-15);
        }
        // <psi_10|psi_11> = 0 via <0+1|0-1> = 0
        let s10 = states.state(StateLabel::new(1, 0)).unwrap();
        let s11 = states.state(StateLabel::new(1, 1)).unwrap();
        assert!(s10.bob.inner(&s11.bob).norm() < 1e-15);
    }

    #[test]
    fn breidbart_is_orthonormal_bisector() {
        let (phi0, phi1) = breidbart_basis();
        assert!(phi0.inner(&phi1).norm() < 1e-15);
        let c2 = (std::f64::consts::PI / 8.0).cos().powi(2);
        // |<phi0|0>|^2 = cos^2(pi/8)
        assert!((phi0.inner(&Ket::basis(2, 0)).norm_sqr() - c2).abs() < 1e-14);
        // the Breidbart vector bisects |0> and |+>: |<phi0|+>|^2 = cos^2(pi/8)
        assert!((phi0.inner(&kp(2, 0, 1)).norm_sqr() - c2).abs() < 1e-14);
    }

    #[test]
    fn gv_subset_family() {
        let fam = gv_subsets();
        assert_eq!(fam.subsets.len(), 4);
        assert_eq!(
            fam.subsets[0].members,
            vec![StateLabel::new(0, 0), StateLabel::new(1, 0)]
        );
        // Bob parts of S_01 are {|0>, |0-1>}
        let states = gv_states();
        let s01 = &fam.subsets[1];
        let bobs: Vec<&Ket> = s01
            .members
            .iter()
            .map(|&l| &states.state(l).unwrap().bob)
            .collect();
        assert!((bobs[0].inner(&Ket::basis(2, 0)).norm() - 1.0).abs() < 1e-15);
        assert!((bobs[1].inner(&km(2, 0, 1)).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn twofour_bob_parts_by_subspace() {
        let states = twofour_states();
        for s in &states.states {
            // j in {0,1} lives in span{|0>,|1>}; j in {2,3} in span{|2>,|3>}
            let amps = s.bob.amplitudes();
            if s.label.j < 2 {
                assert!(amps[2].norm() < 1e-15 && amps[3].norm() < 1e-15);
            } else {
                assert!(amps[0].norm() < 1e-15 && amps[1].norm() < 1e-15);
            }
        }
        // psi_12's Bob part is |2+3> with norm 1
        let s = states.state(StateLabel::new(1, 2)).unwrap();
        assert!((s.bob.inner(&kp(4, 2, 3)).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domino_psi11_is_product_of_ones() {
        let states = domino_states();
        let s = states.state(StateLabel::new(1, 1)).unwrap();
        assert!((s.joint().inner(&Ket::basis(3, 1).tensor(&Ket::basis(3, 1))).norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn domino_subsets_and_guess_functions() {
        let ds = domino_subsets();
        assert_eq!(ds.family.subsets.len(), 8);
        // S_4 = {psi_10, psi_11, psi_02}
        assert_eq!(
            ds.family.subsets[4].members,
            vec![
                StateLabel::new(1, 0),
                StateLabel::new(1, 1),
                StateLabel::new(0, 2)
            ]
        );
        // S_4 <-> g = (1,1,0); S_0 <-> (0,0,0); S_5 <-> (1,1,1); S_3 <-> (2,2,2)
        assert_eq!(ds.guess_functions[4].values(), &[1, 1, 0]);
        assert_eq!(ds.guess_functions[0].values(), &[0, 0, 0]);
        assert_eq!(ds.guess_functions[5].values(), &[1, 1, 1]);
        assert_eq!(ds.guess_functions[3].values(), &[2, 2, 2]);
        // Bob parts of S_0 = {|0-1>, |0+1>, |2>} are orthonormal
        let states = domino_states();
        let bobs: Vec<&Ket> = ds.family.subsets[0]
            .members
            .iter()
            .map(|&l| &states.state(l).unwrap().bob)
            .collect();
        for (a, ka) in bobs.iter().enumerate() {
            for (b, kb) in bobs.iter().enumerate() {
                let want = if a == b { 1.0 } else { 0.0 };
                assert!((ka.inner(kb).norm() - want).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn row_mixtures_structure() {
        let rows = domino_row_mixtures();
        assert_eq!(rows.len(), 3);
        for state in rows.states() {
            let m = state.density_matrix();
            assert!((m.trace().re - 1.0).abs() < 1e-14);
            // rank 3: mixture of three orthogonal pure states
            let eig = m.eig_hermitian().unwrap();
            let nonzero = eig.eigenvalues.iter().filter(|x| x.abs() > 1e-12).count();
            assert_eq!(nonzero, 3);
        }
        // rho_0 - rho_1 is traceless
        let d = rows.states()[0]
            .density_matrix()
            .sub(&rows.states()[1].density_matrix());
        assert!(d.trace().norm() < 1e-14);
    }

    #[test]
    fn row_mixtures_bob_side_block_diagonal() {
        let rows = domino_row_mixtures();
        for state in rows.states() {
            let m = state.density_matrix();
            for b in 0..3 {
                for bp in 0..3 {
                    if b == bp {
                        continue;
                    }
                    for a in 0..3 {
                        for ap in 0..3 {
                            assert!(
                                m[(a * 3 + b, ap * 3 + bp)].norm() < 1e-14,
                                "off-diagonal Bob block ({b},{bp}) nonzero"
                            );
                        }
                    }
                }
            }
        }
    }

    #[test]
    fn sigma_closed_forms() {
        let sigmas = sigma_operators();
        assert_eq!(sigmas.len(), 8);
        let s = 1.0 / 6.0;
        let sigma0 = ComplexMatrix::from_real(
            3,
            3,
            &[5.0 * s, -s, 0.0, -s, s, 0.0, 0.0, 0.0, 0.0],
        );
        assert!(sigmas[0].sub(&sigma0).frobenius_norm() < tol::CONSTRUCTION);
        let third = 1.0 / 3.0;
        let sigma4 = km(3, 0, 1)
            .projector()
            .add(&Ket::basis(3, 1).projector())
            .add(&kp(3, 1, 2).projector())
            .scale_re(third);
        assert!(sigmas[4].sub(&sigma4).frobenius_norm() < tol::CONSTRUCTION);
        for s in &sigmas {
            assert!((s.trace().re - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn sigma_conjugation_identities() {
        let sigmas = sigma_operators();
        let (u, v) = symmetry_unitaries();
        let conj = |w: &ComplexMatrix, m: &ComplexMatrix| w.matmul(m).matmul(&w.dagger());
        // each claimed identity, checked directly
        assert!(sigmas[1].sub(&conj(&u, &sigmas[0])).frobenius_norm() < 1e-14);
        assert!(sigmas[2].sub(&conj(&v, &conj(&u, &sigmas[0]))).frobenius_norm() < 1e-14);
        assert!(sigmas[3].sub(&conj(&v, &sigmas[0])).frobenius_norm() < 1e-14);
        assert!(sigmas[5].sub(&conj(&u, &sigmas[4])).frobenius_norm() < 1e-14);
        assert!(sigmas[6].sub(&conj(&u, &conj(&v, &sigmas[4]))).frobenius_norm() < 1e-14);
        assert!(sigmas[7].sub(&conj(&v, &sigmas[4])).frobenius_norm() < 1e-14);
    }

    #[test]
    fn sigma_set_invariant_under_symmetries() {
        let sigmas = sigma_operators();
        let (u, v) = symmetry_unitaries();
        assert!(u.matmul(&u.dagger()).sub(&ComplexMatrix::identity(3)).frobenius_norm() < 1e-15);
        assert!(v.matmul(&v.dagger()).sub(&ComplexMatrix::identity(3)).frobenius_norm() < 1e-15);
        // V|0> = |2>
        assert!((v.apply(Ket::basis(3, 0).amplitudes())[2] - c64(1.0, 0.0)).norm() < 1e-15);
        for w in [&u, &v] {
            for s in &sigmas {
                let c = w.matmul(s).matmul(&w.dagger());
                let hits = sigmas
                    .iter()
                    .filter(|t| t.sub(&c).frobenius_norm() < tol::CONSTRUCTION)
                    .count();
                assert_eq!(hits, 1, "conjugated σ not found in the set exactly once");
            }
        }
    }

    #[test]
    fn effective_operators_match_sigmas() {
        let a_gs = effective_guess_operators(&domino_row_mixtures(), Party::B).unwrap();
        assert_eq!(a_gs.len(), 27);
        let sigmas = sigma_operators();
        let ds = domino_subsets();
        // the 8 subset guess functions give A_g = sigma_k / 3
        for (kk, g) in ds.guess_functions.iter().enumerate() {
            let (_, a) = a_gs
                .iter()
                .find(|(h, _)| h == g)
                .expect("subset guess function in enumeration");
            assert!(
                a.sub(&sigmas[kk].scale_re(1.0 / 3.0)).frobenius_norm() < tol::CONSTRUCTION,
                "A_g != sigma_{kk}/3"
            );
        }
        // first function in enumeration order is (0,0,0)
        assert_eq!(a_gs[0].0.values(), &[0, 0, 0]);
        // constant functions sum to a trace-1 operator
        let mut acc = ComplexMatrix::zeros(3, 3);
        for t in [0usize, 1, 2] {
            let g = GuessFunction::new(vec![t, t, t], 3).unwrap();
            let (_, a) = a_gs.iter().find(|(h, _)| *h == g).unwrap();
            acc = acc.add(a);
        }
        assert!((acc.trace().re - 1.0).abs() < 1e-14);
    }

    #[test]
    fn effective_operators_gv_alice_classical() {
        // row mixtures over the column index j, Alice classical
        let states = gv_states();
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
        assert_eq!(a_gs.len(), 4);
        // A for constant g = 0 (subset S_00) is (|0><0| + |+><+|)/4 on Bob's side
        let want = Ket::basis(2, 0)
            .projector()
            .add(&kp(2, 0, 1).projector())
            .scale_re(0.25);
        assert!(a_gs[0].1.sub(&want).frobenius_norm() < 1e-14);
    }

    #[test]
    fn effective_operators_reject_nondiagonal_side() {
        // the full gv ensemble is not Bob-side block-diagonal
        let err = effective_guess_operators(&gv_ensemble(), Party::B);
        assert!(matches!(err, Err(Error::NotClassicallyDiagonal { .. })));
    }

    #[test]
    fn named_problem_lookup() {
        for name in [
            "gv",
            "twofour",
            "domino",
            "domino-rows",
            "gv-bob-subsets",
            "domino-sigma",
            "domino-rows-alice",
        ] {
            assert!(problem(name).is_some(), "missing problem {name}");
        }
        assert!(problem("nope").is_none());
        let p = problem("domino-rows-alice").unwrap();
        assert_eq!(p.ensemble.len(), 27);
        assert!((p.ensemble.priors().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        assert!((p.objective_scale - 9.0).abs() < 1e-12);
    }
}
