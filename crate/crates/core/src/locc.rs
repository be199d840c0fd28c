//! Local-measurement protocols with classical communication, represented as
//! finite trees: each internal node is one party's measurement with a child
//! per outcome, each leaf a guess.
//!
//! Internal measurements are projective and update the state by the Lüders
//! rule `ρ → PρP / Tr(Pρ)`. A general POVM is allowed at a node only when the
//! acting party never measures again below it — the other party's conditional
//! state is then independent of any Kraus choice, so the semantics stay
//! unambiguous (the symmetric Kraus `√E` is used).
//!
//! Messages are counted as party alternations along root-to-leaf paths; a
//! protocol is one-way when every path has at most one alternation.

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha12Rng;
use serde::{Deserialize, Serialize};

use num_complex::Complex64;

use crate::catalog::{breidbart_basis, domino_states, domino_subsets};
use crate::matrix::{tol, ComplexMatrix, Party};
use crate::model::{Ensemble, EnsembleState, Ket};
use crate::optimizer::solve_symmetric_gamma;
use crate::{Error, Result};

/// Branches with conditional probability below this are pruned rather than
/// renormalized (avoids 0/0 on impossible outcomes).
const BRANCH_PRUNE: f64 = 1e-14;

/// One node of a protocol tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum ProtocolNode {
    Measure {
        party: Party,
        effects: Vec<ComplexMatrix>,
        children: Vec<ProtocolNode>,
    },
    Leaf { guess: String },
}

impl ProtocolNode {
    fn leaf(guess: impl Into<String>) -> Self {
        ProtocolNode::Leaf { guess: guess.into() }
    }

    fn measure_basis(party: Party, basis: &[Ket], children: Vec<ProtocolNode>) -> Self {
        ProtocolNode::Measure {
            party,
            effects: basis.iter().map(|k| k.projector()).collect(),
            children,
        }
    }
}

/// A finite tree of party-local measurements over a fixed bipartite split.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "ProtocolJson", into = "ProtocolJson")]
pub struct LoccProtocol {
    pub dims: (usize, usize),
    pub root: ProtocolNode,
}

#[derive(Serialize, Deserialize)]
struct ProtocolJson {
    parties: Vec<String>,
    dims: Vec<usize>,
    root: ProtocolNode,
}

impl TryFrom<ProtocolJson> for LoccProtocol {
    type Error = Error;

    fn try_from(j: ProtocolJson) -> Result<Self> {
        if j.parties != ["A", "B"] {
            return Err(Error::InvalidProtocol(format!(
                "expected parties [\"A\", \"B\"], got {:?}",
                j.parties
            )));
        }
        if j.dims.len() != 2 {
            return Err(Error::InvalidProtocol(format!(
                "expected two dims, got {:?}",
                j.dims
            )));
        }
        let protocol = LoccProtocol {
            dims: (j.dims[0], j.dims[1]),
            root: j.root,
        };
        protocol.validate()?;
        Ok(protocol)
    }
}

impl From<LoccProtocol> for ProtocolJson {
    fn from(p: LoccProtocol) -> ProtocolJson {
        ProtocolJson {
            parties: vec!["A".into(), "B".into()],
            dims: vec![p.dims.0, p.dims.1],
            root: p.root,
        }
    }
}

/// Shape summary produced by [`LoccProtocol::validate`].
#[derive(Debug, Clone, Copy, Serialize, Deserialize)]
pub struct ProtocolStats {
    /// Maximum number of party alternations along any root-to-leaf path.
    pub messages: usize,
    pub one_way: bool,
    pub measurement_nodes: usize,
    pub leaves: usize,
}

impl LoccProtocol {
    fn party_dim(&self, party: Party) -> usize {
        match party {
            Party::A => self.dims.0,
            Party::B => self.dims.1,
        }
    }

    /// Checks the tree: per-node completeness on the acting party's space,
    /// projectivity of every measurement that is followed by more
    /// measurements on the same party, and child/effect count agreement.
    /// Returns message counts.
    pub fn validate(&self) -> Result<ProtocolStats> {
        let mut stats = ProtocolStats {
            messages: 0,
            one_way: true,
            measurement_nodes: 0,
            leaves: 0,
        };
        self.validate_node(&self.root, None, 0, &mut stats)?;
        stats.one_way = stats.messages <= 1;
        Ok(stats)
    }

    fn validate_node(
        &self,
        node: &ProtocolNode,
        last_party: Option<Party>,
        alternations: usize,
        stats: &mut ProtocolStats,
    ) -> Result<()> {
        match node {
            ProtocolNode::Leaf { .. } => {
                stats.leaves += 1;
                stats.messages = stats.messages.max(alternations);
                Ok(())
            }
            ProtocolNode::Measure { party, effects, children } => {
                stats.measurement_nodes += 1;
                let dim = self.party_dim(*party);
                if effects.is_empty() {
                    return Err(Error::InvalidProtocol("node with no effects".into()));
                }
                if children.len() != effects.len() {
                    return Err(Error::InvalidProtocol(format!(
                        "{} effects but {} children",
                        effects.len(),
                        children.len()
                    )));
                }
                let mut sum = ComplexMatrix::zeros(dim, dim);
                for e in effects {
                    if e.rows() != dim || e.cols() != dim {
                        return Err(Error::InvalidProtocol(format!(
                            "effect is {}x{} on party {party} of dim {dim}",
                            e.rows(),
                            e.cols()
                        )));
                    }
                    if e.hermitian_residual() > tol::HERMITICITY_REJECT {
                        return Err(Error::InvalidProtocol("non-Hermitian effect".into()));
                    }
                    let psd = e.is_psd(tol::CERTIFICATION)?;
                    if !psd.psd {
                        return Err(Error::InvalidProtocol(format!(
                            "effect with negative eigenvalue {:.3e}",
                            psd.min_eigenvalue
                        )));
                    }
                    sum = sum.add(e);
                }
                let completeness = sum.sub(&ComplexMatrix::identity(dim)).frobenius_norm();
                if completeness > tol::CERTIFICATION {
                    return Err(Error::InvalidProtocol(format!(
                        "effects miss the identity by {completeness:.3e} on party {party}"
                    )));
                }

                if !measurement_is_projective(effects) {
                    for child in children {
                        if subtree_measures_party(child, *party) {
                            return Err(Error::InvalidProtocol(format!(
                                "party {party} applies a non-projective measurement and measures \
                                 again afterwards; the post-measurement state on {party} would \
                                 depend on an arbitrary Kraus choice"
                            )));
                        }
                    }
                }

                let next_alt = match last_party {
                    Some(lp) if lp != *party => alternations + 1,
                    _ => alternations,
                };
                for child in children {
                    self.validate_node(child, Some(*party), next_alt, stats)?;
                }
                Ok(())
            }
        }
    }
}

fn measurement_is_projective(effects: &[ComplexMatrix]) -> bool {
    for (i, e) in effects.iter().enumerate() {
        if e.matmul(e).sub(e).frobenius_norm() > tol::CERTIFICATION {
            return false;
        }
        for f in effects.iter().skip(i + 1) {
            if e.matmul(f).frobenius_norm() > tol::CERTIFICATION {
                return false;
            }
        }
    }
    true
}

fn subtree_measures_party(node: &ProtocolNode, party: Party) -> bool {
    match node {
        ProtocolNode::Leaf { .. } => false,
        ProtocolNode::Measure { party: p, children, .. } => {
            *p == party || children.iter().any(|c| subtree_measures_party(c, party))
        }
    }
}

/// Protocol compiled against an ensemble: Kraus operators per outcome and
/// guesses resolved to state indices.
struct CompiledNode {
    party: Party,
    /// Local-space Kraus operator per outcome: the effect itself when the
    /// measurement is projective, `√E` otherwise.
    kraus: Vec<ComplexMatrix>,
    /// Kraus extended to the joint space (for density-operator propagation).
    kraus_joint: Vec<ComplexMatrix>,
    children: Vec<CompiledChild>,
}

enum CompiledChild {
    Node(Box<CompiledNode>),
    Leaf(usize),
}

fn compile(
    node: &ProtocolNode,
    protocol: &LoccProtocol,
    ensemble: &Ensemble,
) -> Result<CompiledChild> {
    match node {
        ProtocolNode::Leaf { guess } => Ok(CompiledChild::Leaf(ensemble.label_index(guess)?)),
        ProtocolNode::Measure { party, effects, children } => {
            let projective = measurement_is_projective(effects);
            let kraus: Vec<ComplexMatrix> = effects
                .iter()
                .map(|e| if projective { Ok(e.clone()) } else { e.sqrt_psd() })
                .collect::<Result<_>>()?;
            let kraus_joint: Vec<ComplexMatrix> = kraus
                .iter()
                .map(|k| k.embed(protocol.dims, *party))
                .collect::<Result<_>>()?;
            let children = children
                .iter()
                .map(|c| compile(c, protocol, ensemble))
                .collect::<Result<_>>()?;
            Ok(CompiledChild::Node(Box::new(CompiledNode {
                party: *party,
                kraus,
                kraus_joint,
                children,
            })))
        }
    }
}

/// Per-state outcome of an exact protocol evaluation.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateEvaluation {
    pub label: String,
    /// Probability of ending at a leaf guessing this state.
    pub success: f64,
    /// Total leaf-reach probability (1 up to numerical noise).
    pub reach: f64,
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct ExactEvaluation {
    pub success_probability: f64,
    pub per_state: Vec<StateEvaluation>,
}

/// Exact success probability of a protocol on an ensemble: branch states are
/// propagated with Born probabilities and Lüders updates, and a leaf scores
/// its branch probability when its guess names the prepared state.
pub fn evaluate(protocol: &LoccProtocol, ensemble: &Ensemble) -> Result<ExactEvaluation> {
    check_dims(protocol, ensemble)?;
    protocol.validate()?;
    let root = compile(&protocol.root, protocol, ensemble)?;

    let mut per_state = Vec::with_capacity(ensemble.len());
    let mut success_probability = 0.0;
    for (j, state) in ensemble.states().iter().enumerate() {
        let rho = state.density_matrix();
        let (mut success, mut reach) = (0.0, 0.0);
        walk_density(&root, &rho, 1.0, j, &mut success, &mut reach);
        success_probability += ensemble.priors()[j] * success;
        per_state.push(StateEvaluation {
            label: ensemble.labels()[j].clone(),
            success,
            reach,
        });
    }
    Ok(ExactEvaluation {
        success_probability: success_probability.clamp(0.0, 1.0),
        per_state,
    })
}

/// [`evaluate`], reduced to the aggregate success probability.
pub fn evaluate_exact(protocol: &LoccProtocol, ensemble: &Ensemble) -> Result<f64> {
    Ok(evaluate(protocol, ensemble)?.success_probability)
}

fn walk_density(
    child: &CompiledChild,
    rho: &ComplexMatrix,
    prob: f64,
    target: usize,
    success: &mut f64,
    reach: &mut f64,
) {
    match child {
        CompiledChild::Leaf(guess) => {
            *reach += prob;
            if *guess == target {
                *success += prob;
            }
        }
        CompiledChild::Node(node) => {
            for (k, next) in node.kraus_joint.iter().zip(&node.children) {
                let updated = k.matmul(rho).matmul(&k.dagger());
                let p = updated.trace().re;
                if p < BRANCH_PRUNE {
                    continue;
                }
                walk_density(next, &updated.scale_re(1.0 / p), prob * p, target, success, reach);
            }
        }
    }
}

fn check_dims(protocol: &LoccProtocol, ensemble: &Ensemble) -> Result<()> {
    let dims = ensemble.bipartite_dims()?;
    if dims != protocol.dims {
        return Err(Error::DimensionMismatch(format!(
            "protocol on {}⊗{} but ensemble on {}⊗{}",
            protocol.dims.0, protocol.dims.1, dims.0, dims.1
        )));
    }
    Ok(())
}

/// Per-state tallies of a Monte-Carlo run.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct StateSample {
    pub label: String,
    pub draws: u64,
    pub successes: u64,
    pub frequency: f64,
}

/// Seeded Monte-Carlo record. The aggregate is the prior-weighted mean of the
/// per-state frequencies; the standard error is the binomial estimate at the
/// aggregate frequency.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct SampleReport {
    pub shots: u64,
    pub seed: u64,
    pub per_state: Vec<StateSample>,
    pub aggregate_frequency: f64,
    pub standard_error: f64,
}

/// Simulates the protocol shot by shot: the prepared state is drawn from the
/// priors, each measurement outcome from its Born probabilities with the
/// corresponding state update. Reproducible: the generator is ChaCha12 seeded
/// with `seed`, and the seed is recorded in the report.
pub fn sample(
    protocol: &LoccProtocol,
    ensemble: &Ensemble,
    shots: u64,
    seed: u64,
) -> Result<SampleReport> {
    if shots == 0 {
        return Err(Error::InvalidProtocol("shots must be at least 1".into()));
    }
    check_dims(protocol, ensemble)?;
    protocol.validate()?;
    let root = compile(&protocol.root, protocol, ensemble)?;
    let mut rng = ChaCha12Rng::seed_from_u64(seed);

    let n = ensemble.len();
    let mut draws = vec![0u64; n];
    let mut successes = vec![0u64; n];

    for _ in 0..shots {
        let state_index = draw_index(ensemble.priors(), &mut rng);
        draws[state_index] += 1;
        let guessed = match &ensemble.states()[state_index] {
            EnsembleState::Pure(ket) => {
                run_shot_pure(&root, ket.amplitudes().to_vec(), protocol.dims, &mut rng)
            }
            EnsembleState::Mixed(d) => run_shot_density(&root, d.matrix().clone(), &mut rng),
        };
        if guessed == state_index {
            successes[state_index] += 1;
        }
    }

    let per_state: Vec<StateSample> = (0..n)
        .map(|j| StateSample {
            label: ensemble.labels()[j].clone(),
            draws: draws[j],
            successes: successes[j],
            frequency: if draws[j] > 0 {
                successes[j] as f64 / draws[j] as f64
            } else {
                0.0
            },
        })
        .collect();
    let aggregate_frequency: f64 = per_state
        .iter()
        .zip(ensemble.priors())
        .map(|(s, &p)| p * s.frequency)
        .sum();
    let standard_error = (aggregate_frequency * (1.0 - aggregate_frequency) / shots as f64).sqrt();
    Ok(SampleReport {
        shots,
        seed,
        per_state,
        aggregate_frequency,
        standard_error,
    })
}

fn draw_index(weights: &[f64], rng: &mut ChaCha12Rng) -> usize {
    let u: f64 = rng.random::<f64>();
    let mut acc = 0.0;
    for (i, &w) in weights.iter().enumerate() {
        acc += w;
        if u < acc {
            return i;
        }
    }
    weights.len() - 1
}

/// Applies a party-local operator to a joint ket without forming the
/// Kronecker product.
fn apply_local(
    op: &ComplexMatrix,
    party: Party,
    dims: (usize, usize),
    ket: &[Complex64],
) -> Vec<Complex64> {
    let (da, db) = dims;
    let mut out = vec![Complex64::ZERO; da * db];
    match party {
        Party::A => {
            for a in 0..da {
                for ap in 0..da {
                    let k = op[(a, ap)];
                    if k == Complex64::ZERO {
                        continue;
                    }
                    for b in 0..db {
                        out[a * db + b] += k * ket[ap * db + b];
                    }
                }
            }
        }
        Party::B => {
            for b in 0..db {
                for bp in 0..db {
                    let k = op[(b, bp)];
                    if k == Complex64::ZERO {
                        continue;
                    }
                    for a in 0..da {
                        out[a * db + b] += k * ket[a * db + bp];
                    }
                }
            }
        }
    }
    out
}

fn run_shot_pure(
    root: &CompiledChild,
    mut ket: Vec<Complex64>,
    dims: (usize, usize),
    rng: &mut ChaCha12Rng,
) -> usize {
    let mut node = root;
    loop {
        match node {
            CompiledChild::Leaf(guess) => return *guess,
            CompiledChild::Node(n) => {
                let branches: Vec<Vec<Complex64>> = n
                    .kraus
                    .iter()
                    .map(|k| apply_local(k, n.party, dims, &ket))
                    .collect();
                let probs: Vec<f64> = branches
                    .iter()
                    .map(|v| v.iter().map(|z| z.norm_sqr()).sum())
                    .collect();
                let outcome = draw_outcome(&probs, rng);
                let p = probs[outcome];
                let scale = 1.0 / p.sqrt();
                ket = branches[outcome].iter().map(|&z| z * scale).collect();
                debug_assert!(
                    (ket.iter().map(|z| z.norm_sqr()).sum::<f64>() - 1.0).abs() < 1e-12
                );
                node = &n.children[outcome];
            }
        }
    }
}

fn run_shot_density(root: &CompiledChild, mut rho: ComplexMatrix, rng: &mut ChaCha12Rng) -> usize {
    let mut node = root;
    loop {
        match node {
            CompiledChild::Leaf(guess) => return *guess,
            CompiledChild::Node(n) => {
                let branches: Vec<ComplexMatrix> = n
                    .kraus_joint
                    .iter()
                    .map(|k| k.matmul(&rho).matmul(&k.dagger()))
                    .collect();
                let probs: Vec<f64> = branches.iter().map(|m| m.trace().re).collect();
                let outcome = draw_outcome(&probs, rng);
                rho = branches[outcome].scale_re(1.0 / probs[outcome]);
                node = &n.children[outcome];
            }
        }
    }
}

fn draw_outcome(probs: &[f64], rng: &mut ChaCha12Rng) -> usize {
    let total: f64 = probs.iter().sum();
    let u: f64 = rng.random::<f64>() * total;
    let mut acc = 0.0;
    let mut last_live = 0;
    for (i, &p) in probs.iter().enumerate() {
        if p < BRANCH_PRUNE {
            continue;
        }
        last_live = i;
        acc += p;
        if u < acc {
            return i;
        }
    }
    last_live
}

/// A named protocol bundled with the catalog ensemble it plays against.
#[derive(Debug, Clone)]
pub struct BuiltinProtocol {
    pub name: &'static str,
    pub description: &'static str,
    pub ensemble_name: &'static str,
    pub protocol: LoccProtocol,
}

fn z_basis(dim: usize) -> Vec<Ket> {
    (0..dim).map(|i| Ket::basis(dim, i)).collect()
}

fn gv_forward() -> LoccProtocol {
    let alice_z = z_basis(2);
    let bob_z = z_basis(2);
    let bob_x = vec![Ket::two_term(2, 0, 1, 1.0), Ket::two_term(2, 0, 1, -1.0)];
    LoccProtocol {
        dims: (2, 2),
        root: ProtocolNode::measure_basis(
            Party::A,
            &alice_z,
            vec![
                ProtocolNode::measure_basis(
                    Party::B,
                    &bob_z,
                    vec![ProtocolNode::leaf("psi_00"), ProtocolNode::leaf("psi_01")],
                ),
                ProtocolNode::measure_basis(
                    Party::B,
                    &bob_x,
                    vec![ProtocolNode::leaf("psi_10"), ProtocolNode::leaf("psi_11")],
                ),
            ],
        ),
    }
}

/// Backward protocol over the gv set for a given Bob basis and subset
/// pairing: Bob's outcome picks a subset, Alice's z measurement picks the
/// member.
fn gv_backward(bob_basis: &[Ket], subsets: [[&str; 2]; 2]) -> LoccProtocol {
    let alice_z = z_basis(2);
    let children = subsets
        .iter()
        .map(|pair| {
            ProtocolNode::measure_basis(
                Party::A,
                &alice_z,
                vec![ProtocolNode::leaf(pair[0]), ProtocolNode::leaf(pair[1])],
            )
        })
        .collect();
    LoccProtocol {
        dims: (2, 2),
        root: ProtocolNode::Measure {
            party: Party::B,
            effects: bob_basis.iter().map(|k| k.projector()).collect(),
            children,
        },
    }
}

fn gv_backward_breidbart() -> LoccProtocol {
    let (phi0, phi1) = breidbart_basis();
    // outcome 0 -> S_00 = {psi_00, psi_10}, outcome 1 -> S_11 = {psi_01, psi_11}
    gv_backward(&[phi0, phi1], [["psi_00", "psi_10"], ["psi_01", "psi_11"]])
}

fn gv_backward_alternate() -> LoccProtocol {
    // the degenerate optimum: the Breidbart basis reflected to -π/8, with the
    // S_01/S_10 pairing
    let c = (std::f64::consts::PI / 8.0).cos();
    let s = (std::f64::consts::PI / 8.0).sin();
    let phi0 = Ket::from_real(&[c, -s]).unwrap();
    let phi1 = Ket::from_real(&[s, c]).unwrap();
    gv_backward(&[phi0, phi1], [["psi_00", "psi_11"], ["psi_01", "psi_10"]])
}

fn twofour_bob_pm() -> Vec<Ket> {
    vec![
        Ket::two_term(4, 0, 1, 1.0),
        Ket::two_term(4, 0, 1, -1.0),
        Ket::two_term(4, 2, 3, 1.0),
        Ket::two_term(4, 2, 3, -1.0),
    ]
}

fn bob_final_z(guesses: [&str; 4]) -> ProtocolNode {
    ProtocolNode::measure_basis(
        Party::B,
        &z_basis(4),
        guesses.iter().map(|g| ProtocolNode::leaf(*g)).collect(),
    )
}

fn bob_final_pm(guesses: [&str; 4]) -> ProtocolNode {
    ProtocolNode::measure_basis(
        Party::B,
        &twofour_bob_pm(),
        guesses.iter().map(|g| ProtocolNode::leaf(*g)).collect(),
    )
}

fn twofour_two_way() -> LoccProtocol {
    let alice_z = z_basis(2);
    let alice_x = vec![Ket::two_term(2, 0, 1, 1.0), Ket::two_term(2, 0, 1, -1.0)];
    // Bob's non-demolition subspace projection {P_01, P_23}
    let p01 = Ket::basis(4, 0).projector().add(&Ket::basis(4, 1).projector());
    let p23 = Ket::basis(4, 2).projector().add(&Ket::basis(4, 3).projector());
    LoccProtocol {
        dims: (2, 4),
        root: ProtocolNode::Measure {
            party: Party::B,
            effects: vec![p01, p23],
            children: vec![
                // states psi_00, psi_01, psi_10, psi_11
                ProtocolNode::measure_basis(
                    Party::A,
                    &alice_z,
                    vec![
                        bob_final_z(["psi_00", "psi_01", "psi_02", "psi_03"]),
                        bob_final_pm(["psi_10", "psi_11", "psi_12", "psi_13"]),
                    ],
                ),
                // states psi_02, psi_03, psi_12, psi_13
                ProtocolNode::measure_basis(
                    Party::A,
                    &alice_x,
                    vec![
                        bob_final_z(["psi_00", "psi_01", "psi_02", "psi_03"]),
                        bob_final_pm(["psi_10", "psi_11", "psi_12", "psi_13"]),
                    ],
                ),
            ],
        },
    }
}

fn twofour_oneway_ab() -> LoccProtocol {
    let (phi0, phi1) = breidbart_basis();
    LoccProtocol {
        dims: (2, 4),
        root: ProtocolNode::measure_basis(
            Party::A,
            &[phi0, phi1],
            vec![
                bob_final_z(["psi_00", "psi_01", "psi_02", "psi_03"]),
                bob_final_pm(["psi_10", "psi_11", "psi_12", "psi_13"]),
            ],
        ),
    }
}

fn twofour_oneway_ba() -> LoccProtocol {
    // Breidbart within each Bob subspace: the subspace projection composed
    // with the per-subspace intermediate basis
    let c = (std::f64::consts::PI / 8.0).cos();
    let s = (std::f64::consts::PI / 8.0).sin();
    let beta = vec![
        Ket::from_real(&[c, s, 0.0, 0.0]).unwrap(),
        Ket::from_real(&[s, -c, 0.0, 0.0]).unwrap(),
        Ket::from_real(&[0.0, 0.0, c, s]).unwrap(),
        Ket::from_real(&[0.0, 0.0, s, -c]).unwrap(),
    ];
    let alice_z = z_basis(2);
    let alice_x = vec![Ket::two_term(2, 0, 1, 1.0), Ket::two_term(2, 0, 1, -1.0)];
    let alice_pick = |basis: &[Ket], first: &str, second: &str| {
        ProtocolNode::measure_basis(
            Party::A,
            basis,
            vec![ProtocolNode::leaf(first), ProtocolNode::leaf(second)],
        )
    };
    LoccProtocol {
        dims: (2, 4),
        root: ProtocolNode::measure_basis(
            Party::B,
            &beta,
            vec![
                alice_pick(&alice_z, "psi_00", "psi_10"),
                alice_pick(&alice_z, "psi_01", "psi_11"),
                alice_pick(&alice_x, "psi_02", "psi_12"),
                alice_pick(&alice_x, "psi_03", "psi_13"),
            ],
        ),
    }
}

fn domino_oneway() -> Result<LoccProtocol> {
    let solution = solve_symmetric_gamma()?;
    let states = domino_states();
    let subsets = domino_subsets();
    let children = subsets
        .family
        .subsets
        .iter()
        .map(|subset| {
            let basis: Vec<Ket> = subset
                .members
                .iter()
                .map(|&l| states.state(l).expect("verified label").bob.clone())
                .collect();
            ProtocolNode::measure_basis(
                Party::B,
                &basis,
                subset
                    .members
                    .iter()
                    .map(|l| ProtocolNode::leaf(l.to_string()))
                    .collect(),
            )
        })
        .collect();
    Ok(LoccProtocol {
        dims: (3, 3),
        root: ProtocolNode::Measure {
            party: Party::A,
            effects: solution.povm.effects().to_vec(),
            children,
        },
    })
}

/// Every protocol discussed for the catalog ensembles, paired with the name
/// of the ensemble it plays against.
pub fn builtin_protocols() -> Result<Vec<BuiltinProtocol>> {
    Ok(vec![
        BuiltinProtocol {
            name: "gv_forward",
            description: "Alice z, then Bob z or x conditioned on her result (perfect)",
            ensemble_name: "gv",
            protocol: gv_forward(),
        },
        BuiltinProtocol {
            name: "gv_backward_breidbart",
            description: "Bob Breidbart picks S_00/S_11, Alice z finishes",
            ensemble_name: "gv",
            protocol: gv_backward_breidbart(),
        },
        BuiltinProtocol {
            name: "gv_backward_alternate",
            description: "the degenerate optimum: reflected Breidbart picks S_01/S_10",
            ensemble_name: "gv",
            protocol: gv_backward_alternate(),
        },
        BuiltinProtocol {
            name: "twofour_two_way",
            description: "Bob subspace projection, Alice z or x, Bob finishes (perfect, 2 messages)",
            ensemble_name: "twofour",
            protocol: twofour_two_way(),
        },
        BuiltinProtocol {
            name: "twofour_oneway_AB",
            description: "Alice Breidbart, Bob conditioned 4-outcome basis",
            ensemble_name: "twofour",
            protocol: twofour_oneway_ab(),
        },
        BuiltinProtocol {
            name: "twofour_oneway_BA",
            description: "Bob per-subspace Breidbart, Alice conditioned basis",
            ensemble_name: "twofour",
            protocol: twofour_oneway_ba(),
        },
        BuiltinProtocol {
            name: "domino_oneway",
            description: "Alice's optimal 8-outcome subset POVM, Bob resolves the subset",
            ensemble_name: "domino",
            protocol: domino_oneway()?,
        },
    ])
}

/// Looks up a built-in protocol by name.
pub fn builtin_protocol(name: &str) -> Result<Option<BuiltinProtocol>> {
    Ok(builtin_protocols()?.into_iter().find(|b| b.name == name))
}
