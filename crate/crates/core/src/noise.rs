//! Single-qubit depolarizing noise, exact mixed-state evaluation and Monte
//! Carlo trajectories.
//!
//! The channel on qubit `q` with rate `ε` is
//! `ρ -> (1 - ε) ρ + ε · I/2 ⊗ tr_q ρ`, implemented as the equivalent Pauli
//! mixture `(1 - 3ε/4) ρ + (ε/4)(XρX + YρY + ZρZ)` so that the exact and the
//! sampled evaluators share one definition. A two-qubit gate receives one
//! independent insertion on each operand.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::circuit::{Circuit, CountsTable, Op};
use crate::error::{Error, Result};
use crate::state::{
    DensityMatrix, Fill, PureState, QubitIndex, MAX_DENSITY_QUBITS, MAX_PURE_QUBITS,
};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TwoQubitRule {
    /// One independent single-qubit channel on each operand.
    #[default]
    IndependentPerQubit,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoiseModel {
    pub epsilon: f64,
    #[serde(default)]
    pub two_qubit_rule: TwoQubitRule,
    /// Adds one channel on the measured qubit before every measurement.
    #[serde(default)]
    pub noisy_measurement: bool,
}

impl NoiseModel {
    pub fn new(epsilon: f64) -> Result<Self> {
        let m = NoiseModel {
            epsilon,
            two_qubit_rule: TwoQubitRule::IndependentPerQubit,
            noisy_measurement: false,
        };
        m.validate()?;
        Ok(m)
    }

    pub fn noiseless() -> Self {
        NoiseModel {
            epsilon: 0.0,
            two_qubit_rule: TwoQubitRule::IndependentPerQubit,
            noisy_measurement: false,
        }
    }

    pub fn with_noisy_measurement(mut self, on: bool) -> Self {
        self.noisy_measurement = on;
        self
    }

    pub fn validate(&self) -> Result<()> {
        check_epsilon(self.epsilon)
    }
}

impl Default for NoiseModel {
    fn default() -> Self {
        Self::noiseless()
    }
}

fn check_epsilon(epsilon: f64) -> Result<()> {
    if !(0.0..=1.0).contains(&epsilon) {
        return Err(Error::InvalidProbability(epsilon));
    }
    Ok(())
}

/// Applies the depolarizing channel with rate `epsilon` to qubit `q`.
pub fn depolarize(rho: &DensityMatrix, q: QubitIndex, epsilon: f64) -> Result<DensityMatrix> {
    check_epsilon(epsilon)?;
    crate::state::check_qubit(q, rho.num_qubits())?;
    let mut out = rho.clone();
    out.depolarize_in_place(q, epsilon);
    Ok(out)
}

/// The channel in replacement form, `(1 − ε) ρ + ε · I/2 ⊗ tr_q ρ`, computed
/// entry by entry. Slower than [`depolarize`]; kept as a reference.
pub fn depolarize_replacement_form(rho: &DensityMatrix, q: QubitIndex, epsilon: f64) -> Result<DensityMatrix> {
    check_epsilon(epsilon)?;
    crate::state::check_qubit(q, rho.num_qubits())?;
    let dim = rho.dim();
    let bit = 1usize << q;
    let mut data = rho.data().to_vec();
    for r in 0..dim {
        for c in 0..dim {
            let mut v = data[r * dim + c] * (1.0 - epsilon);
            if (r & bit) == (c & bit) {
                let (r0, c0) = (r & !bit, c & !bit);
                let traced = rho.get(r0, c0) + rho.get(r0 | bit, c0 | bit);
                v += traced * (0.5 * epsilon);
            }
            data[r * dim + c] = v;
        }
    }
    DensityMatrix::from_data(rho.num_qubits(), data)
}

/// The channel as the explicit Pauli mixture
/// `(1 − 3ε/4) ρ + (ε/4)(XρX + YρY + ZρZ)`. Reference form.
pub fn depolarize_pauli_form(rho: &DensityMatrix, q: QubitIndex, epsilon: f64) -> Result<DensityMatrix> {
    check_epsilon(epsilon)?;
    crate::state::check_qubit(q, rho.num_qubits())?;
    let mut out = rho.clone();
    out.scale(1.0 - 0.75 * epsilon);
    for code in 1..=3 {
        let mut term = rho.clone();
        term.apply_pauli_code(q, code);
        out.add_scaled(&term, 0.25 * epsilon);
    }
    Ok(out)
}

/// A noise channel placed before operation `position` of the base circuit
/// (`position == len` means after the last operation).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Insertion {
    pub position: usize,
    pub qubit: QubitIndex,
    pub epsilon: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct NoisyCircuit {
    base: Circuit,
    insertions: Vec<Insertion>,
}

impl NoisyCircuit {
    /// Wraps a circuit with explicit insertions, validating their positions.
    pub fn new(base: Circuit, mut insertions: Vec<Insertion>) -> Result<Self> {
        for ins in &insertions {
            if ins.position > base.len() {
                return Err(Error::Protocol(format!(
                    "insertion position {} beyond circuit length {}",
                    ins.position,
                    base.len()
                )));
            }
            crate::state::check_qubit(ins.qubit, base.num_qubits())?;
            check_epsilon(ins.epsilon)?;
        }
        insertions.sort_by_key(|i| i.position);
        Ok(NoisyCircuit { base, insertions })
    }

    pub fn noiseless(base: Circuit) -> Self {
        NoisyCircuit {
            base,
            insertions: Vec::new(),
        }
    }

    pub fn base(&self) -> &Circuit {
        &self.base
    }

    pub fn insertions(&self) -> &[Insertion] {
        &self.insertions
    }

    /// Insertions grouped by position: `groups[p]` are applied before op `p`.
    fn grouped(&self) -> Vec<Vec<Insertion>> {
        let mut groups = vec![Vec::new(); self.base.len() + 1];
        for ins in &self.insertions {
            groups[ins.position].push(*ins);
        }
        groups
    }
}

/// Places noise according to `model`: one insertion after every single-qubit
/// gate, one per operand after every two-qubit gate, and, if enabled, one
/// before every measurement.
pub fn instrument(circuit: &Circuit, model: &NoiseModel) -> Result<NoisyCircuit> {
    model.validate()?;
    let eps = model.epsilon;
    let mut insertions = Vec::new();
    for (i, op) in circuit.ops().iter().enumerate() {
        match op {
            Op::Gate(g) => {
                for &q in g.targets() {
                    insertions.push(Insertion {
                        position: i + 1,
                        qubit: q,
                        epsilon: eps,
                    });
                }
            }
            Op::Measure { qubit, .. } if model.noisy_measurement => insertions.push(Insertion {
                position: i,
                qubit: *qubit,
                epsilon: eps,
            }),
            Op::Measure { .. } => {}
        }
    }
    NoisyCircuit::new(circuit.clone(), insertions)
}

/// One measurement branch of an exact run.
#[derive(Clone, Debug)]
pub struct Branch {
    /// Outcome per classical bit.
    pub outcomes: Vec<u8>,
    pub probability: f64,
    /// Conditional (normalized) state; measured qubits sit in `|outcome>`.
    pub state: DensityMatrix,
}

/// Exact output of a noisy circuit, split by measurement record.
#[derive(Clone, Debug)]
pub struct BranchTable {
    pub branches: Vec<Branch>,
}

impl BranchTable {
    pub fn get(&self, outcomes: &[u8]) -> Option<&Branch> {
        self.branches.iter().find(|b| b.outcomes == outcomes)
    }

    pub fn total_probability(&self) -> f64 {
        self.branches.iter().map(|b| b.probability).sum()
    }

    /// Unconditioned output `Σ_b p_b ρ_b`.
    pub fn average(&self) -> DensityMatrix {
        self.combine(|_, _| Ok(()), |_| true).expect("non-empty branch table")
    }

    /// `Σ p_b · f(ρ_b) / Σ p_b` over branches accepted by `select`, after
    /// letting `f` modify each branch state (e.g. to apply a correction).
    pub fn combine(
        &self,
        f: impl Fn(&[u8], &mut DensityMatrix) -> Result<()>,
        select: impl Fn(&[u8]) -> bool,
    ) -> Result<DensityMatrix> {
        let mut acc: Option<DensityMatrix> = None;
        let mut weight = 0.0;
        for b in self.branches.iter().filter(|b| select(&b.outcomes)) {
            let mut s = b.state.clone();
            f(&b.outcomes, &mut s)?;
            match acc.as_mut() {
                None => {
                    s.scale(b.probability);
                    acc = Some(s);
                }
                Some(a) => a.add_scaled(&s, b.probability),
            }
            weight += b.probability;
        }
        let mut out = acc.ok_or_else(|| Error::Protocol("no branch matches the selection".into()))?;
        out.scale(1.0 / weight);
        Ok(out)
    }
}

/// Evaluates a noisy circuit exactly on density matrices, starting from `|0…0>`.
pub fn run_density(nc: &NoisyCircuit) -> Result<BranchTable> {
    let n = nc.base.num_qubits();
    crate::state::check_width(n, MAX_DENSITY_QUBITS)?;
    let groups = nc.grouped();
    let mut branches = vec![(Vec::<u8>::new(), DensityMatrix::new(n, Fill::AllZero)?)];
    let clbits = nc.base.num_clbits();
    for (pos, op) in nc.base.ops().iter().enumerate() {
        for ins in &groups[pos] {
            for (_, rho) in &mut branches {
                rho.depolarize_in_place(ins.qubit, ins.epsilon);
            }
        }
        match op {
            Op::Gate(g) => {
                for (_, rho) in &mut branches {
                    rho.apply(g)?;
                }
            }
            Op::Measure { qubit, basis, clbit } => {
                let mut next = Vec::with_capacity(branches.len() * 2);
                for (outcomes, rho) in branches {
                    for bit in [0u8, 1] {
                        let mut b = rho.clone();
                        let w = b.project(*qubit, *basis, bit);
                        if w > 1e-15 {
                            let mut o = outcomes.clone();
                            o.resize(clbits, 0);
                            o[*clbit] = bit;
                            next.push((o, b));
                        }
                    }
                }
                branches = next;
            }
        }
    }
    for ins in &groups[nc.base.len()] {
        for (_, rho) in &mut branches {
            rho.depolarize_in_place(ins.qubit, ins.epsilon);
        }
    }
    let branches = branches
        .into_iter()
        .map(|(mut outcomes, mut state)| {
            outcomes.resize(clbits, 0);
            let probability = state.trace().re;
            state.scale(1.0 / probability);
            Branch {
                outcomes,
                probability,
                state,
            }
        })
        .collect();
    Ok(BranchTable { branches })
}

/// Measurement record of one trajectory.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ShotRecord {
    pub shot: u64,
    pub outcomes: Vec<u8>,
}

/// Mixes a root seed with an index (e.g. grid point or setting) into an
/// independent child seed.
pub fn derive_seed(seed: u64, index: u64) -> u64 {
    let mut z = seed ^ index.wrapping_add(1).wrapping_mul(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Per-shot random stream: the root seed selects the key, the shot index the
/// stream, so every shot is reproducible on its own.
pub fn shot_rng(seed: u64, shot: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(shot);
    rng
}

/// Applies one sampled channel realization to qubit `q` of a trajectory.
pub fn apply_sampled_pauli<R: Rng + ?Sized>(psi: &mut PureState, q: QubitIndex, epsilon: f64, rng: &mut R) {
    psi.apply_pauli_code(q, sample_pauli(rng, epsilon));
}

fn sample_pauli<R: Rng + ?Sized>(rng: &mut R, epsilon: f64) -> u8 {
    let u: f64 = rng.random();
    let quarter = epsilon / 4.0;
    if u >= 3.0 * quarter {
        0
    } else {
        (1 + (u / quarter) as u8).min(3)
    }
}

/// Runs one trajectory with its own random stream; returns the record and final state.
pub fn run_shot(nc: &NoisyCircuit, seed: u64, shot: u64) -> Result<(ShotRecord, PureState, ChaCha8Rng)> {
    let n = nc.base.num_qubits();
    crate::state::check_width(n, MAX_PURE_QUBITS)?;
    let mut rng = shot_rng(seed, shot);
    let mut psi = PureState::new(n, Fill::AllZero)?;
    let mut outcomes = vec![0u8; nc.base.num_clbits()];
    let mut next = nc.insertions.iter().peekable();
    for (pos, op) in nc.base.ops().iter().enumerate() {
        while let Some(ins) = next.next_if(|i| i.position == pos) {
            apply_sampled_pauli(&mut psi, ins.qubit, ins.epsilon, &mut rng);
        }
        match op {
            Op::Gate(g) => psi.apply(g)?,
            Op::Measure { qubit, basis, clbit } => {
                outcomes[*clbit] = psi.measure(*qubit, *basis, &mut rng)?.outcome;
            }
        }
    }
    for ins in next {
        apply_sampled_pauli(&mut psi, ins.qubit, ins.epsilon, &mut rng);
    }
    Ok((ShotRecord { shot, outcomes }, psi, rng))
}

/// Runs `shots` trajectories in parallel and maps each through `f`.
///
/// `f` receives the record, the final pure state and the shot's random
/// stream (for further sampling, e.g. readout). Results come back in shot
/// order, so the output does not depend on the thread count.
pub fn map_trajectories<T, F>(nc: &NoisyCircuit, shots: u64, seed: u64, f: F) -> Result<Vec<T>>
where
    T: Send,
    F: Fn(&ShotRecord, PureState, &mut ChaCha8Rng) -> Result<T> + Sync,
{
    if shots == 0 {
        return Err(Error::Protocol("trajectory run needs at least one shot".into()));
    }
    crate::state::check_width(nc.base.num_qubits(), MAX_PURE_QUBITS)?;
    (0..shots)
        .into_par_iter()
        .map(|shot| {
            let (record, psi, mut rng) = run_shot(nc, seed, shot)?;
            f(&record, psi, &mut rng)
        })
        .collect()
}

/// Histogram of the circuit's measurement records over `shots` trajectories.
pub fn run_trajectories(nc: &NoisyCircuit, shots: u64, seed: u64) -> Result<CountsTable> {
    let records = map_trajectories(nc, shots, seed, |r, _, _| Ok(r.outcomes.clone()))?;
    let mut counts = CountsTable::new();
    for r in &records {
        counts.record(r);
    }
    Ok(counts)
}

/// Mean of the reduced state over `keep` across trajectories, with an
/// optional per-shot transformation of the final pure state.
pub fn average_reduced_state<F>(
    nc: &NoisyCircuit,
    shots: u64,
    seed: u64,
    keep: &[QubitIndex],
    correct: F,
) -> Result<DensityMatrix>
where
    F: Fn(&ShotRecord, &mut PureState) -> Result<()> + Sync,
{
    let reduced = map_trajectories(nc, shots, seed, |r, mut psi, _| {
        correct(r, &mut psi)?;
        psi.reduced(keep)
    })?;
    let mut acc = reduced[0].clone();
    for r in &reduced[1..] {
        acc.add_scaled(r, 1.0);
    }
    acc.scale(1.0 / shots as f64);
    Ok(acc)
}
