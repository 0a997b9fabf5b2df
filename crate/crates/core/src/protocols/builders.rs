//! Constructors for the supported protocols.

use serde::{Deserialize, Serialize};

use super::topology::{DeviceTopology, NETWORK_LINKS, NETWORK_LOCAL};
use super::{CorrectionRule, Mode, PairSpec, PairTarget, ProtocolInstance, ProtocolKind};
use crate::circuit::{Circuit, Op};
use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::graph::{graph_from_clifford_gates, graph_from_edges};
use crate::state::{MeasurementBasis, PureState};

/// Placement of logical qubits on a device.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Layout {
    pub topology: DeviceTopology,
    /// Physical qubit of each logical qubit.
    pub qubits: Vec<usize>,
}

impl Layout {
    pub fn new(topology: DeviceTopology, qubits: Vec<usize>) -> Self {
        Layout { topology, qubits }
    }

    fn tokyo(qubits: &[usize]) -> Self {
        Layout::new(DeviceTopology::tokyo_subgraph(), qubits.to_vec())
    }

    fn check(&self, logical: usize) -> Result<()> {
        if self.qubits.len() != logical {
            return Err(Error::Protocol(format!(
                "embedding lists {} qubits, protocol needs {logical}",
                self.qubits.len()
            )));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(Error::DuplicateQubit(*q));
            }
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum MqncStage {
    /// Bell links plus intra-node entangling gates; no measurements.
    Step1,
    /// Six-qubit butterfly graph, X measurements on the two relay qubits.
    Step2Onward,
    /// All fourteen qubits: links, intra-node gates, Y then X measurements.
    Full,
}

struct Parts {
    kind: ProtocolKind,
    roles: Vec<String>,
    circuit: Circuit,
    output: Vec<usize>,
    target: PureState,
    pairs: Vec<PairSpec>,
    rule: CorrectionRule,
}

fn assemble(parts: Parts, layout: Layout, mode: Mode) -> Result<ProtocolInstance> {
    layout.check(parts.circuit.num_qubits())?;
    let inst = ProtocolInstance {
        kind: parts.kind,
        roles: parts.roles,
        topology: layout.topology,
        embedding: layout.qubits,
        mode: Mode::FeedForward,
        circuit: parts.circuit,
        output: parts.output,
        target: parts.target,
        pairs: parts.pairs,
        rule: parts.rule,
    };
    inst.validate_embedding(&inst.topology).into_result()?;
    inst.with_mode(mode)
}

fn pair(roles: &[String], output: &[usize], positions: [usize; 2], target: PairTarget) -> PairSpec {
    PairSpec {
        label: format!("{}-{}", roles[output[positions[0]]], roles[output[positions[1]]]),
        positions,
        target,
    }
}

fn names(list: &[&str]) -> Vec<String> {
    list.iter().map(|s| s.to_string()).collect()
}

/// Two Bell pairs `(a, m1)` and `(m2, b)` joined by a Bell measurement on
/// the middle qubits; the default embedding is Tokyo qubits 0-5-6-11.
pub fn build_swapping(layout: Option<Layout>, mode: Mode) -> Result<ProtocolInstance> {
    let layout = layout.unwrap_or_else(|| Layout::tokyo(&[0, 5, 6, 11]));
    let mut c = Circuit::new(4);
    for g in [
        Gate::h(0),
        Gate::cx(0, 1),
        Gate::h(2),
        Gate::cx(2, 3),
        Gate::cx(1, 2),
        Gate::h(1),
    ] {
        c.gate(g)?;
    }
    c.measure(1, MeasurementBasis::Z)?;
    c.measure(2, MeasurementBasis::Z)?;
    let roles = names(&["a", "m1", "m2", "b"]);
    let output = vec![0, 3];
    let pairs = vec![pair(&roles, &output, [0, 1], PairTarget::PhiPlus)];
    let parts = Parts {
        kind: ProtocolKind::Swapping,
        roles,
        circuit: c,
        output,
        target: PairTarget::PhiPlus.state(),
        pairs,
        rule: CorrectionRule::Swap,
    };
    assemble(parts, layout, mode)
}

/// Circuit preparing a graph state: `H` on every qubit, then `CZ` per edge.
fn graph_circuit(n: usize, edges: &[(usize, usize)]) -> Result<Circuit> {
    let mut c = Circuit::new(n);
    for q in 0..n {
        c.gate(Gate::h(q))?;
    }
    for &(a, b) in edges {
        c.gate(Gate::cz(a, b))?;
    }
    Ok(c)
}

/// Checks that, for the all-zero record, the measurements leave exactly the
/// pair edges, so undoing the frame yields the pair targets.
fn check_pairs(inst: &ProtocolInstance) -> Result<()> {
    let zeros = vec![0u8; inst.circuit.num_clbits()];
    let g = inst.graph_after(&zeros)?;
    let mut want: Vec<(usize, usize)> = inst
        .pairs
        .iter()
        .map(|p| {
            let (a, b) = (inst.output[p.positions[0]], inst.output[p.positions[1]]);
            (a.min(b), a.max(b))
        })
        .collect();
    want.sort();
    if g.edges() != want {
        return Err(Error::Protocol(format!(
            "measurements leave edges {:?}, expected {want:?}",
            g.edges()
        )));
    }
    Ok(())
}

fn pair_product(pairs: usize) -> Result<PureState> {
    let g2 = PairTarget::G2.state();
    let mut t = g2.clone();
    for _ in 1..pairs {
        t = t.tensor(&g2)?;
    }
    Ok(t)
}

/// Linear cluster of `n` qubits with X measurements on the interior, leaving
/// a two-vertex graph state on the ends. For `n ≤ 5` the default embedding is
/// the Tokyo chain 0-5-10-15-16; longer chains default to a line device.
pub fn build_linear_mbqc(n: usize, layout: Option<Layout>, mode: Mode) -> Result<ProtocolInstance> {
    if n < 2 {
        return Err(Error::Protocol(format!("a chain needs at least 2 qubits, got {n}")));
    }
    let layout = layout.unwrap_or_else(|| {
        if n <= 5 {
            Layout::tokyo(&[0, 5, 10, 15, 16][..n])
        } else {
            Layout::new(DeviceTopology::line(n), (0..n).collect())
        }
    });
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    let mut c = graph_circuit(n, &edges)?;
    for q in 1..n - 1 {
        c.measure(q, MeasurementBasis::X)?;
    }
    let roles: Vec<String> = (0..n).map(|i| format!("v{i}")).collect();
    let output = vec![0, n - 1];
    let pairs = vec![pair(&roles, &output, [0, 1], PairTarget::G2)];
    let parts = Parts {
        kind: ProtocolKind::LinearMbqc(n),
        roles,
        circuit: c,
        output,
        target: PairTarget::G2.state(),
        pairs,
        rule: CorrectionRule::Graph(graph_from_edges(n, &edges)?),
    };
    let inst = assemble(parts, layout, mode)?;
    check_pairs(&inst)?;
    Ok(inst)
}

const BUTTERFLY_ROLES: [&str; 6] = ["s1", "s2", "r1", "r2", "t1", "t2"];

/// Butterfly graph over logical `[s1, s2, r1, r2, t1, t2]`: sources feed r1,
/// r1-r2 is the bottleneck, r2 feeds both sinks, and each source is also
/// linked to the opposite sink.
pub const BUTTERFLY_EDGES: [(usize, usize); 7] = [(0, 2), (1, 2), (2, 3), (3, 4), (3, 5), (0, 5), (1, 4)];

/// Physical Tokyo qubits of `[s1, s2, r1, r2, t1, t2]`.
pub const BUTTERFLY_TOKYO: [usize; 6] = [0, 10, 5, 6, 11, 1];

/// Network-coding protocol producing the crossing pairs s1-t1 and s2-t2.
///
/// The 14-qubit layout keeps one qubit per node (logical 0..6 in the order
/// of the six-qubit stage) and numbers the link qubits 6..14:
/// `s1→t2, s2→t1, r1→s1, r1→s2, r2→t1, r2→t2, t1→s2, t2→s1`. Each network
/// link is a two-vertex graph state; inside a node the kept qubit is joined
/// to the node's other qubits. Y measurements on the link qubits shrink this
/// to the butterfly graph, after which the six-qubit procedure applies.
pub fn build_mqnc(stage: MqncStage, layout: Option<Layout>, mode: Mode) -> Result<ProtocolInstance> {
    let mut roles = names(&BUTTERFLY_ROLES);
    let (kind, n, graph, c, default_layout) = match stage {
        MqncStage::Step2Onward => {
            let mut c = graph_circuit(6, &BUTTERFLY_EDGES)?;
            c.measure(2, MeasurementBasis::X)?;
            c.measure(3, MeasurementBasis::X)?;
            (
                ProtocolKind::MqncStep2Onward,
                6,
                graph_from_edges(6, &BUTTERFLY_EDGES)?,
                c,
                Layout::tokyo(&BUTTERFLY_TOKYO),
            )
        }
        MqncStage::Step1 | MqncStage::Full => {
            roles.extend(names(&[
                "s1.t2", "s2.t1", "r1.s2", "r1.r2", "r2.t1", "r2.t2", "t1.r2", "t2.r2",
            ]));
            let mut c = Circuit::new(14);
            for &(a, b) in &NETWORK_LINKS {
                c.gate(Gate::h(a))?;
                c.gate(Gate::cx(a, b))?;
            }
            for &(a, b) in &NETWORK_LOCAL {
                c.gate(Gate::cz(a, b))?;
            }
            let prep: Vec<Gate> = c
                .ops()
                .iter()
                .filter_map(|op| match op {
                    Op::Gate(g) => Some(*g),
                    Op::Measure { .. } => None,
                })
                .collect();
            let kind = if stage == MqncStage::Full {
                for q in 6..14 {
                    c.measure(q, MeasurementBasis::Y)?;
                }
                c.measure(2, MeasurementBasis::X)?;
                c.measure(3, MeasurementBasis::X)?;
                ProtocolKind::MqncFull
            } else {
                ProtocolKind::MqncStep1
            };
            // Bell pairs plus CZs prepare a graph state only up to local
            // Cliffords; the oracle starts from that framed graph.
            let graph = graph_from_clifford_gates(14, &prep)?;
            let layout = Layout::new(DeviceTopology::mqnc_network(), (0..14).collect());
            (kind, 14, graph, c, layout)
        }
    };
    let (output, target, pairs) = if stage == MqncStage::Step1 {
        ((0..n).collect(), graph.to_statevector()?, vec![])
    } else {
        let output = vec![0, 4, 1, 5];
        let pairs = vec![
            pair(&roles, &output, [0, 1], PairTarget::G2),
            pair(&roles, &output, [2, 3], PairTarget::G2),
        ];
        (output, pair_product(2)?, pairs)
    };
    let parts = Parts {
        kind,
        roles,
        circuit: c,
        output,
        target,
        pairs,
        rule: CorrectionRule::Graph(graph),
    };
    let inst = assemble(parts, layout.unwrap_or(default_layout), mode)?;
    if stage != MqncStage::Step1 {
        check_pairs(&inst)?;
    }
    Ok(inst)
}
