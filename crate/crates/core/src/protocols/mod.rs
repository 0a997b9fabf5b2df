//! Entanglement-distribution protocols: builders, byproduct corrections and
//! evaluation under noise.
//!
//! Every protocol is a [`ProtocolInstance`]: a circuit over logical qubits, an
//! embedding of those qubits into a device, the output qubits with their
//! target state, and a [`Mode`] saying how measurement records are used.
//! Corrections are applied as a noiseless classical frame update after the
//! circuit has run.

mod builders;
mod butterfly;
mod topology;

pub use builders::{build_linear_mbqc, build_mqnc, build_swapping, Layout, MqncStage};
pub use butterfly::classical_butterfly;
pub use topology::{check_circuit, DeviceTopology, EmbeddingReport, TOKYO_QUBITS};

pub use crate::circuit::CountsTable;

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::analysis::fidelity_pure;
use crate::circuit::{Circuit, Op};
use crate::clifford::LocalClifford;
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind, Mat2};
use crate::graph::GraphState;
use crate::noise::{self, NoiseModel, NoisyCircuit};
use crate::pauli::{Pauli, PauliString};
use crate::state::{
    DensityMatrix, MeasurementBasis, PureState, QubitIndex, MAX_DENSITY_QUBITS,
};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolKind {
    Swapping,
    LinearMbqc(usize),
    MqncStep1,
    MqncStep2Onward,
    MqncFull,
}

impl ProtocolKind {
    /// Outcome pattern used when post-selecting without an explicit choice:
    /// all zeros for swapping and chains, all ones on the network-coding
    /// middle qubits.
    pub fn default_pattern(self) -> String {
        match self {
            ProtocolKind::Swapping => "00".into(),
            ProtocolKind::LinearMbqc(n) => "0".repeat(n.saturating_sub(2)),
            ProtocolKind::MqncStep1 => String::new(),
            ProtocolKind::MqncStep2Onward => "11".into(),
            ProtocolKind::MqncFull => format!("{}11", "0".repeat(8)),
        }
    }
}

impl fmt::Display for ProtocolKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ProtocolKind::Swapping => write!(f, "swapping"),
            ProtocolKind::LinearMbqc(n) => write!(f, "linear-mbqc({n})"),
            ProtocolKind::MqncStep1 => write!(f, "mqnc-step1"),
            ProtocolKind::MqncStep2Onward => write!(f, "mqnc-step2-onward"),
            ProtocolKind::MqncFull => write!(f, "mqnc-full"),
        }
    }
}

/// How measurement records are used.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    /// Keep only runs whose record equals the pattern (clbit 0 first); the
    /// pattern's fixed correction is still applied before comparing with the
    /// target.
    PostSelect(String),
    /// Keep every run and apply its outcome-dependent correction.
    FeedForward,
}

impl Mode {
    pub fn label(&self) -> String {
        match self {
            Mode::PostSelect(p) => format!("post-select({p})"),
            Mode::FeedForward => "feed-forward".into(),
        }
    }
}

/// Ideal state of one distributed pair.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum PairTarget {
    /// `(|00> + |11>)/√2`.
    PhiPlus,
    /// Two-vertex graph state `(|0+> + |1->)/√2`.
    G2,
}

impl PairTarget {
    pub fn state(self) -> PureState {
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let amps = match self {
            PairTarget::PhiPlus => [r, 0.0, 0.0, r],
            PairTarget::G2 => [0.5, 0.5, 0.5, -0.5],
        };
        PureState::from_amplitudes(amps.iter().map(|&a| a.into()).collect()).expect("normalized")
    }

    /// Local unitaries `(position, U)` taking the target to `|Φ+>`.
    pub fn bell_transform(self) -> Vec<(usize, Mat2)> {
        match self {
            PairTarget::PhiPlus => vec![],
            PairTarget::G2 => vec![(1, crate::gate::H)],
        }
    }
}

/// A distributed pair: two positions in the output list plus the target.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PairSpec {
    pub label: String,
    pub positions: [usize; 2],
    pub target: PairTarget,
}

/// Local corrections on output positions.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Correction {
    pub factors: Vec<(usize, LocalClifford)>,
}

impl Correction {
    pub fn is_identity(&self) -> bool {
        self.factors.iter().all(|(_, c)| c.is_identity())
    }

    /// The correction as a Pauli string over `width` output positions, if
    /// every factor is a Pauli (up to phase).
    pub fn as_pauli_string(&self, width: usize) -> Option<PauliString> {
        let mut s = PauliString::identity(width);
        for &(pos, c) in &self.factors {
            let p = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
                .into_iter()
                .find(|&p| LocalClifford::pauli(p) == c)?;
            s.letters[pos] = p;
        }
        Some(s)
    }

    pub fn apply_density(&self, rho: &mut DensityMatrix) -> Result<()> {
        for &(pos, c) in &self.factors {
            if !c.is_identity() {
                rho.apply_matrix(pos, &c.matrix())?;
            }
        }
        Ok(())
    }

    /// Applies the correction to a full register, `output[pos]` being the
    /// register qubit of output position `pos`.
    pub fn apply_pure(&self, psi: &mut PureState, output: &[QubitIndex]) -> Result<()> {
        for &(pos, c) in &self.factors {
            if !c.is_identity() {
                psi.apply_matrix(output[pos], &c.matrix())?;
            }
        }
        Ok(())
    }
}

/// How byproduct corrections are derived.
#[derive(Clone, Debug, PartialEq)]
enum CorrectionRule {
    /// Bell-measurement swap: `Z^{m0}` on the first output, `X^{m1}` on the second.
    Swap,
    /// Replay the measurements on this graph state and undo the final frame.
    Graph(GraphState),
}

#[derive(Clone, Debug, PartialEq)]
pub struct ProtocolInstance {
    kind: ProtocolKind,
    roles: Vec<String>,
    topology: DeviceTopology,
    embedding: Vec<usize>,
    mode: Mode,
    circuit: Circuit,
    output: Vec<QubitIndex>,
    target: PureState,
    pairs: Vec<PairSpec>,
    rule: CorrectionRule,
}

/// Result of evaluating a protocol.
#[derive(Clone, Debug)]
pub struct ProtocolOutput {
    /// `"exact"` or `"shot-sampled"`.
    pub estimator: &'static str,
    pub mode: String,
    /// Probability (exact) or fraction (sampled) of accepted runs.
    pub acceptance: f64,
    pub accepted_shots: Option<u64>,
    /// Corrected output state, when the output register is small enough.
    pub state: Option<DensityMatrix>,
    /// Accepted runs before correction.
    pub raw_state: Option<DensityMatrix>,
    /// Fidelity of the corrected output with the full target.
    pub fidelity: f64,
    pub fidelity_stderr: Option<f64>,
    pub pairs: Vec<PairSpec>,
}

impl ProtocolOutput {
    pub fn pair_states(&self) -> Result<Vec<DensityMatrix>> {
        let state = self
            .state
            .as_ref()
            .ok_or_else(|| Error::Analysis("output register too wide for a density matrix".into()))?;
        self.pairs
            .iter()
            .map(|p| state.partial_trace(&p.positions))
            .collect()
    }

    pub fn pair_fidelities(&self) -> Result<Vec<f64>> {
        self.pair_states()?
            .iter()
            .zip(&self.pairs)
            .map(|(rho, p)| fidelity_pure(rho, &p.target.state()))
            .collect()
    }
}

impl ProtocolInstance {
    pub fn kind(&self) -> ProtocolKind {
        self.kind
    }

    pub fn roles(&self) -> &[String] {
        &self.roles
    }

    pub fn topology(&self) -> &DeviceTopology {
        &self.topology
    }

    /// Physical qubit of each logical qubit.
    pub fn embedding(&self) -> &[usize] {
        &self.embedding
    }

    pub fn mode(&self) -> &Mode {
        &self.mode
    }

    pub fn circuit(&self) -> &Circuit {
        &self.circuit
    }

    /// Logical qubits carrying the output, in target order.
    pub fn output(&self) -> &[QubitIndex] {
        &self.output
    }

    pub fn target(&self) -> &PureState {
        &self.target
    }

    pub fn pairs(&self) -> &[PairSpec] {
        &self.pairs
    }

    /// Graph state prepared before the first measurement, for graph protocols.
    pub fn initial_graph(&self) -> Option<&GraphState> {
        match &self.rule {
            CorrectionRule::Graph(g) => Some(g),
            CorrectionRule::Swap => None,
        }
    }

    pub fn with_mode(mut self, mode: Mode) -> Result<Self> {
        if let Mode::PostSelect(p) = &mode {
            let bits = crate::circuit::parse_bits(p)?;
            if bits.len() != self.circuit.num_clbits() {
                return Err(Error::IncompleteOutcomes {
                    expected: self.circuit.num_clbits(),
                    actual: bits.len(),
                });
            }
        }
        self.mode = mode;
        Ok(self)
    }

    /// Same protocol with every CZ compiled as `H(b) · CX(a, b) · H(b)`.
    pub fn with_cz_as_cx(mut self) -> Self {
        let mut c = Circuit::new(self.circuit.num_qubits());
        for op in self.circuit.ops() {
            match op {
                Op::Gate(g) if g.kind() == GateKind::CZ => {
                    let [a, b] = [g.targets()[0], g.targets()[1]];
                    for g in [Gate::h(b), Gate::cx(a, b), Gate::h(b)] {
                        c.gate(g).expect("valid gate");
                    }
                }
                Op::Gate(g) => {
                    c.gate(*g).expect("valid gate");
                }
                Op::Measure { qubit, basis, .. } => {
                    c.measure(*qubit, *basis).expect("valid measurement");
                }
            }
        }
        self.circuit = c;
        self
    }

    pub fn validate_embedding(&self, topology: &DeviceTopology) -> EmbeddingReport {
        check_circuit(topology, &self.embedding, &self.circuit)
    }

    /// Whether a measurement record is kept under the instance's mode.
    pub fn accepts(&self, outcomes: &[u8]) -> bool {
        match &self.mode {
            Mode::FeedForward => true,
            Mode::PostSelect(p) => crate::circuit::bits_to_string(outcomes) == *p,
        }
    }

    /// Corrections that map the noiseless conditional output for this
    /// record onto the target.
    pub fn byproduct_correction(&self, outcomes: &[u8]) -> Result<Correction> {
        if outcomes.len() != self.circuit.num_clbits() {
            return Err(Error::IncompleteOutcomes {
                expected: self.circuit.num_clbits(),
                actual: outcomes.len(),
            });
        }
        match &self.rule {
            CorrectionRule::Swap => {
                let mut factors = Vec::new();
                if outcomes[0] == 1 {
                    factors.push((0, LocalClifford::pauli(Pauli::Z)));
                }
                if outcomes[1] == 1 {
                    factors.push((1, LocalClifford::pauli(Pauli::X)));
                }
                Ok(Correction { factors })
            }
            CorrectionRule::Graph(_) => {
                let g = self.graph_after(outcomes)?;
                let factors = self
                    .output
                    .iter()
                    .enumerate()
                    .filter(|(_, &q)| !g.frame(q).is_identity())
                    .map(|(pos, &q)| (pos, g.frame(q).inverse()))
                    .collect();
                Ok(Correction { factors })
            }
        }
    }

    /// Graph-rewrite prediction of the post-measurement state for a record.
    pub fn graph_after(&self, outcomes: &[u8]) -> Result<GraphState> {
        let CorrectionRule::Graph(g0) = &self.rule else {
            return Err(Error::Protocol(format!("{} is not a graph-state protocol", self.kind)));
        };
        let mut g = g0.clone();
        for op in self.circuit.ops() {
            if let Op::Measure { qubit, basis, clbit } = op {
                g.measure(*qubit, *basis, outcomes[*clbit])?;
            }
        }
        Ok(g)
    }

    pub fn noisy_circuit(&self, noise: &NoiseModel) -> Result<NoisyCircuit> {
        noise::instrument(&self.circuit, noise)
    }

    /// Exact evaluation on density matrices (register width ≤ 10).
    pub fn evaluate_exact(&self, noise: &NoiseModel) -> Result<ProtocolOutput> {
        let table = noise::run_density(&self.noisy_circuit(noise)?)?;
        let mut corrected: Option<DensityMatrix> = None;
        let mut raw: Option<DensityMatrix> = None;
        let mut weight = 0.0;
        for b in table.branches.iter().filter(|b| self.accepts(&b.outcomes)) {
            let rho = b.state.partial_trace(&self.output)?;
            let mut fixed = rho.clone();
            self.byproduct_correction(&b.outcomes)?.apply_density(&mut fixed)?;
            accumulate(&mut raw, &rho, b.probability);
            accumulate(&mut corrected, &fixed, b.probability);
            weight += b.probability;
        }
        let (Some(mut state), Some(mut raw)) = (corrected, raw) else {
            return Err(Error::Protocol(format!("no run matches mode {}", self.mode.label())));
        };
        state.scale(1.0 / weight);
        raw.scale(1.0 / weight);
        Ok(ProtocolOutput {
            estimator: "exact",
            mode: self.mode.label(),
            acceptance: weight,
            accepted_shots: None,
            fidelity: fidelity_pure(&state, &self.target)?,
            fidelity_stderr: None,
            state: Some(state),
            raw_state: Some(raw),
            pairs: self.pairs.clone(),
        })
    }

    /// State of the output qubits in the branch with the given record,
    /// before correction, with its probability.
    pub fn branch_state(&self, noise: &NoiseModel, outcomes: &[u8]) -> Result<(f64, DensityMatrix)> {
        let table = noise::run_density(&self.noisy_circuit(noise)?)?;
        let b = table
            .get(outcomes)
            .ok_or(Error::ZeroProbabilityBranch { probability: 0.0 })?;
        Ok((b.probability, b.state.partial_trace(&self.output)?))
    }

    /// Monte Carlo evaluation: averages the corrected output over accepted
    /// trajectories. Wide outputs (> 10 qubits) only report the fidelity.
    pub fn evaluate_trajectories(&self, noise: &NoiseModel, shots: u64, seed: u64) -> Result<ProtocolOutput> {
        let nc = self.noisy_circuit(noise)?;
        let wide = self.output.len() > MAX_DENSITY_QUBITS;
        if wide && self.output.iter().enumerate().any(|(i, &q)| i != q) {
            return Err(Error::Protocol("wide outputs must cover the register in order".into()));
        }
        let per_shot = noise::map_trajectories(&nc, shots, seed, |rec, mut psi, _| {
            if !self.accepts(&rec.outcomes) {
                return Ok(None);
            }
            self.byproduct_correction(&rec.outcomes)?.apply_pure(&mut psi, &self.output)?;
            if wide {
                Ok(Some((psi.overlap(&self.target)?, None)))
            } else {
                let rho = psi.reduced(&self.output)?;
                Ok(Some((fidelity_pure(&rho, &self.target)?, Some(rho))))
            }
        })?;
        let accepted: Vec<_> = per_shot.into_iter().flatten().collect();
        if accepted.is_empty() {
            return Err(Error::Protocol(format!("no shot matches mode {}", self.mode.label())));
        }
        let k = accepted.len() as f64;
        let fids: Vec<f64> = accepted.iter().map(|(f, _)| *f).collect();
        let (mean, stderr) = crate::analysis::mean_stderr(&fids);
        let state = if wide {
            None
        } else {
            let mut acc: Option<DensityMatrix> = None;
            for (_, rho) in &accepted {
                accumulate(&mut acc, rho.as_ref().expect("narrow output"), 1.0);
            }
            acc.map(|mut a| {
                a.scale(1.0 / k);
                a
            })
        };
        Ok(ProtocolOutput {
            estimator: "shot-sampled",
            mode: self.mode.label(),
            acceptance: k / shots as f64,
            accepted_shots: Some(accepted.len() as u64),
            fidelity: mean,
            fidelity_stderr: Some(stderr),
            state,
            raw_state: None,
            pairs: self.pairs.clone(),
        })
    }

    /// Samples the corrected output in per-position measurement bases after
    /// the local `rotations` (output position, unitary). Rejected runs are
    /// dropped, so the table total is the number of accepted shots. With
    /// `noise.noisy_measurement`, every final measurement carries one channel.
    pub fn sample_output_counts(
        &self,
        noise: &NoiseModel,
        shots: u64,
        seed: u64,
        rotations: &[(usize, Mat2)],
        bases: &[MeasurementBasis],
    ) -> Result<CountsTable> {
        if bases.len() != self.output.len() {
            return Err(Error::WidthMismatch {
                expected: self.output.len(),
                actual: bases.len(),
            });
        }
        let nc = self.noisy_circuit(noise)?;
        let records = noise::map_trajectories(&nc, shots, seed, |rec, mut psi, rng| {
            if !self.accepts(&rec.outcomes) {
                return Ok(None);
            }
            self.byproduct_correction(&rec.outcomes)?.apply_pure(&mut psi, &self.output)?;
            for (pos, u) in rotations {
                psi.apply_matrix(self.output[*pos], u)?;
            }
            let mut bits = Vec::with_capacity(bases.len());
            for (pos, basis) in bases.iter().enumerate() {
                let q = self.output[pos];
                if noise.noisy_measurement {
                    noise::apply_sampled_pauli(&mut psi, q, noise.epsilon, rng);
                }
                bits.push(psi.measure(q, *basis, rng)?.outcome);
            }
            Ok(Some(bits))
        })?;
        let mut counts = CountsTable::new();
        for bits in records.iter().flatten() {
            counts.record(bits);
        }
        Ok(counts)
    }
}

fn accumulate(acc: &mut Option<DensityMatrix>, rho: &DensityMatrix, w: f64) {
    match acc {
        None => {
            let mut r = rho.clone();
            r.scale(w);
            *acc = Some(r);
        }
        Some(a) => a.add_scaled(rho, w),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pair_targets_are_related_by_bell_transform() {
        let mut g2 = PairTarget::G2.state();
        for (pos, u) in PairTarget::G2.bell_transform() {
            g2.apply_matrix(pos, &u).unwrap();
        }
        assert!((g2.overlap(&PairTarget::PhiPlus.state()).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn correction_as_pauli_string() {
        let c = Correction {
            factors: vec![(1, LocalClifford::pauli(Pauli::X)), (2, LocalClifford::pauli(Pauli::Z))],
        };
        assert_eq!(c.as_pauli_string(3).unwrap().to_string(), "+IXZ");
        let h = Correction {
            factors: vec![(0, LocalClifford::h())],
        };
        assert!(h.as_pauli_string(1).is_none());
    }

    #[test]
    fn default_patterns_cover_clbits() {
        assert_eq!(ProtocolKind::LinearMbqc(4).default_pattern(), "00");
        assert_eq!(ProtocolKind::MqncFull.default_pattern().len(), 10);
    }
}
