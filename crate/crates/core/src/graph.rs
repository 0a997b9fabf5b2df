//! Graph states with local-Clifford frames, measured symbolically.
//!
//! A [`GraphState`] represents `(⊗_v C_v) |G>`, where `|G>` is the graph
//! state of the current adjacency and `C_v` is a single-qubit Clifford per
//! vertex (the *frame*). Pauli measurements are carried out with the usual
//! rewrite rules — Z deletes the vertex, Y complements its neighbourhood
//! first, X complements about a chosen neighbour — and the outcome-dependent
//! local unitaries are folded into the frame. No amplitudes are involved, so
//! the engine serves as an independent check of the dense simulators.

use std::collections::BTreeSet;
use std::fmt;

use crate::clifford::LocalClifford;
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind};
use crate::pauli::{Pauli, PauliString, Phase};
use crate::state::{check_width, Fill, MeasurementBasis, PureState, MAX_PURE_QUBITS};

#[derive(Clone, PartialEq, Eq)]
pub struct GraphState {
    alive: Vec<bool>,
    adj: Vec<BTreeSet<usize>>,
    frame: Vec<LocalClifford>,
}

/// Builds the graph state on vertices `0..n` with the given edges and an identity frame.
pub fn graph_from_edges(n: usize, edges: &[(usize, usize)]) -> Result<GraphState> {
    let mut g = GraphState {
        alive: vec![true; n],
        adj: vec![BTreeSet::new(); n],
        frame: vec![LocalClifford::IDENTITY; n],
    };
    for &(a, b) in edges {
        if a == b {
            return Err(Error::Graph(format!("self-loop on vertex {a}")));
        }
        for v in [a, b] {
            if v >= n {
                return Err(Error::Graph(format!("edge ({a}, {b}) references vertex {v} of {n}")));
            }
        }
        g.adj[a].insert(b);
        g.adj[b].insert(a);
    }
    Ok(g)
}

/// Graph form of the state a sequence of Clifford gates prepares from `|0…0>`.
pub fn graph_from_clifford_gates(n: usize, gates: &[Gate]) -> Result<GraphState> {
    check_width(n, MAX_PURE_QUBITS)?;
    let mut t = StabilizerTableau::zero_state(n);
    for g in gates {
        t.apply(g)?;
    }
    t.to_graph()
}

/// Functional form of [`GraphState::measure`].
pub fn measure_vertex(
    g: &GraphState,
    v: usize,
    basis: MeasurementBasis,
    outcome: u8,
) -> Result<GraphState> {
    let mut out = g.clone();
    out.measure(v, basis, outcome)?;
    Ok(out)
}

impl GraphState {
    /// Total number of vertex labels, measured or not.
    pub fn capacity(&self) -> usize {
        self.alive.len()
    }

    /// Unmeasured vertices in increasing order.
    pub fn vertices(&self) -> Vec<usize> {
        (0..self.alive.len()).filter(|&v| self.alive[v]).collect()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.alive.get(v).copied().unwrap_or(false)
    }

    pub fn neighbors(&self, v: usize) -> &BTreeSet<usize> {
        &self.adj[v]
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        self.contains(a) && self.adj[a].contains(&b)
    }

    /// Edges `(a, b)` with `a < b`, sorted.
    pub fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for a in self.vertices() {
            for &b in self.adj[a].range(a + 1..) {
                out.push((a, b));
            }
        }
        out
    }

    pub fn frame(&self, v: usize) -> LocalClifford {
        self.frame[v]
    }

    /// Applies a local Clifford to vertex `v` of the represented state.
    pub fn apply_local(&mut self, v: usize, c: LocalClifford) -> Result<()> {
        self.require(v)?;
        self.frame[v] = c.compose(self.frame[v]);
        Ok(())
    }

    /// Resets every frame entry to the identity, i.e. applies the inverse
    /// frame as a correction.
    pub fn clear_frame(&mut self) {
        self.frame.fill(LocalClifford::IDENTITY);
    }

    fn require(&self, v: usize) -> Result<()> {
        if self.contains(v) {
            Ok(())
        } else {
            Err(Error::Graph(format!("vertex {v} is not present")))
        }
    }

    /// Toggles every edge inside the neighbourhood of `v` (local complementation).
    pub fn local_complement(&mut self, v: usize) {
        let nb: Vec<usize> = self.adj[v].iter().copied().collect();
        for (i, &a) in nb.iter().enumerate() {
            for &b in &nb[i + 1..] {
                if !self.adj[a].remove(&b) {
                    self.adj[a].insert(b);
                    self.adj[b].insert(a);
                } else {
                    self.adj[b].remove(&a);
                }
            }
        }
    }

    fn delete(&mut self, v: usize) {
        let nb: Vec<usize> = std::mem::take(&mut self.adj[v]).into_iter().collect();
        for b in nb {
            self.adj[b].remove(&v);
        }
        self.alive[v] = false;
        self.frame[v] = LocalClifford::IDENTITY;
    }

    /// Probability of `outcome` when measuring `basis` on `v`.
    pub fn outcome_probability(&self, v: usize, basis: MeasurementBasis, outcome: u8) -> Result<f64> {
        self.require(v)?;
        let (neg, q) = self.frame[v].conjugate(basis.as_pauli());
        let graph_outcome = outcome ^ u8::from(neg);
        Ok(if q == Pauli::X && self.adj[v].is_empty() {
            // An isolated vertex is |+>, an X eigenstate.
            if graph_outcome == 0 { 1.0 } else { 0.0 }
        } else {
            0.5
        })
    }

    /// Measures `basis` on `v` with the given outcome (0 ↔ eigenvalue +1),
    /// removes the vertex, and returns the outcome probability.
    pub fn measure(&mut self, v: usize, basis: MeasurementBasis, outcome: u8) -> Result<f64> {
        let p = self.outcome_probability(v, basis, outcome)?;
        if p == 0.0 {
            return Err(Error::ZeroProbabilityBranch { probability: 0.0 });
        }
        // Measuring P on C|G> is measuring C†PC = ±Q on |G>.
        let (neg, q) = self.frame[v].conjugate(basis.as_pauli());
        let minus = (outcome ^ u8::from(neg)) == 1;
        let na: BTreeSet<usize> = self.adj[v].clone();
        let mut updates: Vec<(usize, LocalClifford)> = Vec::new();
        match q {
            Pauli::Z => {
                if minus {
                    updates.extend(na.iter().map(|&b| (b, LocalClifford::pauli(Pauli::Z))));
                }
                self.delete(v);
            }
            Pauli::Y => {
                let root = LocalClifford::sqrt_pauli(Pauli::Z, minus);
                updates.extend(na.iter().map(|&b| (b, root)));
                self.local_complement(v);
                self.delete(v);
            }
            Pauli::X => {
                if let Some(&b0) = na.iter().next() {
                    let nb0 = self.adj[b0].clone();
                    let z = LocalClifford::pauli(Pauli::Z);
                    if minus {
                        updates.push((b0, LocalClifford::sqrt_pauli(Pauli::Y, false)));
                        updates.extend(
                            nb0.iter()
                                .filter(|&&c| c != v && !na.contains(&c))
                                .map(|&c| (c, z)),
                        );
                    } else {
                        updates.push((b0, LocalClifford::sqrt_pauli(Pauli::Y, true)));
                        updates.extend(
                            na.iter()
                                .filter(|&&c| c != b0 && !nb0.contains(&c))
                                .map(|&c| (c, z)),
                        );
                    }
                    self.local_complement(b0);
                    self.local_complement(v);
                    self.delete(v);
                    self.local_complement(b0);
                } else {
                    self.delete(v);
                }
            }
            Pauli::I => unreachable!("measurement bases are non-trivial Paulis"),
        }
        // The new state is (⊗ C_b)(⊗ U_b)|G'>, so each frame becomes C_b · U_b.
        for (b, u) in updates {
            self.frame[b] = self.frame[b].compose(u);
        }
        Ok(p)
    }

    /// Dense state over the unmeasured vertices, qubit `k` being the `k`-th
    /// smallest label. Global phase is arbitrary.
    pub fn to_statevector(&self) -> Result<PureState> {
        let verts = self.vertices();
        check_width(verts.len(), MAX_PURE_QUBITS)?;
        let index = |v: usize| verts.binary_search(&v).expect("alive vertex");
        let mut psi = PureState::new(verts.len(), Fill::AllPlus)?;
        for (a, b) in self.edges() {
            psi.apply(&Gate::cz(index(a), index(b)))?;
        }
        for (k, &v) in verts.iter().enumerate() {
            if !self.frame[v].is_identity() {
                psi.apply_matrix(k, &self.frame[v].matrix())?;
            }
        }
        Ok(psi)
    }

    /// Stabilizer generators of the represented state, one per unmeasured vertex.
    pub fn tableau(&self) -> StabilizerTableau {
        let verts = self.vertices();
        let n = verts.len();
        let rows = verts
            .iter()
            .map(|&v| {
                // K_v = X_v ∏_{b∈N(v)} Z_b, conjugated by the frame: C K C†.
                let mut neg = false;
                let mut letters = vec![Pauli::I; n];
                for (k, &u) in verts.iter().enumerate() {
                    let p = if u == v {
                        Pauli::X
                    } else if self.adj[v].contains(&u) {
                        Pauli::Z
                    } else {
                        continue;
                    };
                    let (s, q) = self.frame[u].inverse().conjugate(p);
                    neg ^= s;
                    letters[k] = q;
                }
                PauliString {
                    letters,
                    phase: if neg { Phase::MinusOne } else { Phase::PlusOne },
                }
            })
            .collect();
        StabilizerTableau { rows }
    }
}

impl fmt::Debug for GraphState {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphState")
            .field("vertices", &self.vertices())
            .field("edges", &self.edges())
            .field(
                "frame",
                &self
                    .vertices()
                    .into_iter()
                    .filter(|&v| !self.frame[v].is_identity())
                    .map(|v| (v, self.frame[v]))
                    .collect::<Vec<_>>(),
            )
            .finish()
    }
}

/// Generating set of a stabilizer group.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct StabilizerTableau {
    pub rows: Vec<PauliString>,
}

impl StabilizerTableau {
    pub fn pairwise_commuting(&self) -> bool {
        self.rows
            .iter()
            .enumerate()
            .all(|(i, a)| self.rows[i + 1..].iter().all(|b| a.commutes_with(b)))
    }

    /// Rank of the rows as binary symplectic vectors.
    pub fn rank(&self) -> usize {
        let mut vecs: Vec<(usize, usize)> = self.rows.iter().map(|r| r.masks()).collect();
        let n = self.rows.first().map_or(0, |r| r.len());
        let mut rank = 0;
        for bit in 0..2 * n {
            let pick = |&(x, z): &(usize, usize)| {
                if bit < n { x >> bit & 1 == 1 } else { z >> (bit - n) & 1 == 1 }
            };
            let Some(pos) = vecs[rank..].iter().position(pick) else {
                continue;
            };
            vecs.swap(rank, rank + pos);
            let pivot = vecs[rank];
            for (i, v) in vecs.iter_mut().enumerate() {
                if i != rank && pick(v) {
                    v.0 ^= pivot.0;
                    v.1 ^= pivot.1;
                }
            }
            rank += 1;
            if rank == vecs.len() {
                break;
            }
        }
        rank
    }

    /// Generators `Z_q` of `|0…0>` on `n` qubits.
    pub fn zero_state(n: usize) -> Self {
        StabilizerTableau {
            rows: (0..n).map(|q| PauliString::sparse(n, &[(q, Pauli::Z)])).collect(),
        }
    }

    fn width(&self) -> usize {
        self.rows.first().map_or(0, |r| r.len())
    }

    /// Replaces letter `q` of every row by `C P C†`.
    fn conjugate_local(&mut self, q: usize, c: LocalClifford) {
        let inv = c.inverse();
        for row in &mut self.rows {
            let (neg, p) = inv.conjugate(row.letters[q]);
            row.letters[q] = p;
            if neg {
                row.phase = Phase::from_exponent(row.phase.exponent() + 2);
            }
        }
    }

    /// Evolves the stabilized state by a Clifford gate (`g → U g U†`).
    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        let n = self.width();
        for &q in gate.targets() {
            if q >= n {
                return Err(Error::QubitOutOfRange { qubit: q, width: n });
            }
        }
        if let Some(m) = gate.kind().matrix() {
            let c = LocalClifford::from_matrix(&m).expect("named one-qubit gates are Clifford");
            self.conjugate_local(gate.targets()[0], c);
            return Ok(());
        }
        let (a, b) = (gate.targets()[0], gate.targets()[1]);
        for row in &mut self.rows {
            let (xa, za) = row.letters[a].bits();
            let (xb, zb) = row.letters[b].bits();
            let (out_a, out_b, flip) = match gate.kind() {
                GateKind::CX => ((xa, za ^ zb), (xb ^ xa, zb), xa && zb && !(xb ^ za)),
                GateKind::CZ => ((xa, za ^ xb), (xb, zb ^ xa), xa && xb && (za ^ zb)),
                GateKind::Swap => ((xb, zb), (xa, za), false),
                other => unreachable!("{other:?} has a matrix"),
            };
            row.letters[a] = Pauli::from_bits(out_a.0, out_a.1);
            row.letters[b] = Pauli::from_bits(out_b.0, out_b.1);
            if flip {
                row.phase = Phase::from_exponent(row.phase.exponent() + 2);
            }
        }
        Ok(())
    }

    /// A graph state with frame representing the same state: every
    /// stabilizer state is locally Clifford-equivalent to a graph state.
    pub fn to_graph(&self) -> Result<GraphState> {
        let n = self.width();
        if self.rows.len() != n || self.rank() != n || !self.pairwise_commuting() {
            return Err(Error::Graph(
                "tableau does not describe a pure stabilizer state".into(),
            ));
        }
        let mut t = self.clone();
        // `applied[v]` maps the state towards the graph state: U|ψ> = |G>.
        let mut applied = vec![LocalClifford::IDENTITY; n];
        let mut local = |t: &mut StabilizerTableau, q: usize, c: LocalClifford| {
            t.conjugate_local(q, c);
            applied[q] = c.compose(applied[q]);
        };
        // Columns without an X pivot get a Hadamard, which makes the X block invertible.
        let x_bit = |r: &PauliString, q: usize| r.letters[q].bits().0;
        let mut masks: Vec<usize> = t.rows.iter().map(|r| r.masks().0).collect();
        let mut rank = 0;
        let mut free = Vec::new();
        for q in 0..n {
            match (rank..n).find(|&i| masks[i] >> q & 1 == 1) {
                Some(i) => {
                    masks.swap(rank, i);
                    let pivot = masks[rank];
                    for (j, m) in masks.iter_mut().enumerate() {
                        if j != rank && *m >> q & 1 == 1 {
                            *m ^= pivot;
                        }
                    }
                    rank += 1;
                }
                None => free.push(q),
            }
        }
        for q in free {
            local(&mut t, q, LocalClifford::h());
        }
        // Gauss–Jordan on the X block, tracking phases.
        for q in 0..n {
            let i = (q..n)
                .find(|&i| x_bit(&t.rows[i], q))
                .ok_or_else(|| Error::Graph("X block is singular".into()))?;
            t.rows.swap(q, i);
            let pivot = t.rows[q].clone();
            for j in 0..n {
                if j != q && x_bit(&t.rows[j], q) {
                    t.rows[j] = t.rows[j].multiply(&pivot)?;
                }
            }
        }
        // Row q is now ±X_q (or Y_q) times Z's: clear diagonal Ys, then signs.
        for q in 0..n {
            if t.rows[q].letters[q] == Pauli::Y {
                local(&mut t, q, LocalClifford::sdg());
            }
        }
        for q in 0..n {
            match t.rows[q].phase {
                Phase::PlusOne => {}
                Phase::MinusOne => local(&mut t, q, LocalClifford::pauli(Pauli::Z)),
                _ => return Err(Error::Graph("non-Hermitian stabilizer".into())),
            }
        }
        let mut edges = Vec::new();
        for (q, row) in t.rows.iter().enumerate() {
            for (j, &p) in row.letters.iter().enumerate() {
                if j > q && p == Pauli::Z {
                    edges.push((q, j));
                }
            }
        }
        let mut g = graph_from_edges(n, &edges)?;
        g.frame = applied.iter().map(|u| u.inverse()).collect();
        Ok(g)
    }

    /// True if every generator has eigenvalue +1 on `psi` within `tol`.
    pub fn stabilizes(&self, psi: &PureState, tol: f64) -> Result<bool> {
        for row in &self.rows {
            if (psi.expectation(row)? - 1.0).abs() > tol {
                return Ok(false);
            }
        }
        Ok(true)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_complex::Complex64;

    fn fid(a: &PureState, b: &PureState) -> f64 {
        a.overlap(b).unwrap()
    }

    /// Dense reference: build the graph, project `v` and drop it.
    fn dense_measure(
        psi: &PureState,
        labels: &mut Vec<usize>,
        v: usize,
        basis: MeasurementBasis,
        outcome: u8,
    ) -> PureState {
        let k = labels.iter().position(|&u| u == v).unwrap();
        let mut s = psi.clone();
        s.measure_forced(k, basis, outcome).unwrap();
        labels.remove(k);
        s.discard_qubit(k, outcome).unwrap()
    }

    #[test]
    fn two_vertex_graph_amplitudes() {
        let g = graph_from_edges(2, &[(0, 1)]).unwrap();
        let psi = g.to_statevector().unwrap();
        let a = psi.amplitudes();
        for (i, want) in [0.5, 0.5, 0.5, -0.5].iter().enumerate() {
            assert!((a[i] - Complex64::new(*want, 0.0)).norm() < 1e-12);
        }
        let empty = graph_from_edges(2, &[]).unwrap();
        let plus = PureState::new(2, Fill::AllPlus).unwrap();
        assert!((fid(&empty.to_statevector().unwrap(), &plus) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn self_loop_rejected() {
        assert!(graph_from_edges(2, &[(1, 1)]).is_err());
        assert!(graph_from_edges(2, &[(0, 2)]).is_err());
    }

    #[test]
    fn absent_vertex_rejected() {
        let mut g = graph_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.measure(1, MeasurementBasis::Z, 0).unwrap();
        assert!(g.measure(1, MeasurementBasis::Z, 0).is_err());
        assert!(g.measure(7, MeasurementBasis::Z, 0).is_err());
    }

    #[test]
    fn every_single_measurement_matches_dense() {
        let edges = [(0, 1), (1, 2), (2, 3), (1, 3), (3, 4)];
        for v in 0..5 {
            for basis in [MeasurementBasis::X, MeasurementBasis::Y, MeasurementBasis::Z] {
                for outcome in [0, 1] {
                    let g = graph_from_edges(5, &edges).unwrap();
                    let mut labels: Vec<usize> = (0..5).collect();
                    let dense = dense_measure(&g.to_statevector().unwrap(), &mut labels, v, basis, outcome);
                    let h = measure_vertex(&g, v, basis, outcome).unwrap();
                    let f = fid(&h.to_statevector().unwrap(), &dense);
                    assert!((f - 1.0).abs() < 1e-10, "v={v} {basis:?} m={outcome}: F={f}");
                }
            }
        }
    }

    #[test]
    fn path_x_measurements_link_the_ends() {
        let g = graph_from_edges(4, &[(0, 1), (1, 2), (2, 3)]).unwrap();
        for m1 in [0, 1] {
            for m2 in [0, 1] {
                let mut h = g.clone();
                h.measure(1, MeasurementBasis::X, m1).unwrap();
                h.measure(2, MeasurementBasis::X, m2).unwrap();
                assert_eq!(h.edges(), vec![(0, 3)]);
            }
        }
    }

    #[test]
    fn path_y_measurement_links_neighbours() {
        let mut g = graph_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.measure(1, MeasurementBasis::Y, 0).unwrap();
        assert_eq!(g.edges(), vec![(0, 2)]);
    }

    #[test]
    fn z_on_leaf_deletes_it() {
        let mut g = graph_from_edges(3, &[(0, 1), (1, 2)]).unwrap();
        g.measure(2, MeasurementBasis::Z, 1).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        assert_eq!(g.frame(1), LocalClifford::pauli(Pauli::Z));
        assert!(g.frame(0).is_identity());
    }

    #[test]
    fn isolated_vertex_x_is_deterministic() {
        let g = graph_from_edges(2, &[]).unwrap();
        assert_eq!(g.outcome_probability(0, MeasurementBasis::X, 0).unwrap(), 1.0);
        assert!(measure_vertex(&g, 0, MeasurementBasis::X, 1).is_err());
        assert_eq!(g.outcome_probability(0, MeasurementBasis::Z, 1).unwrap(), 0.5);
    }

    #[test]
    fn tableau_stabilizes_framed_state() {
        let mut g = graph_from_edges(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap();
        g.measure(2, MeasurementBasis::Y, 1).unwrap();
        g.measure(0, MeasurementBasis::X, 1).unwrap();
        let t = g.tableau();
        assert!(t.pairwise_commuting());
        assert_eq!(t.rank(), t.rows.len());
        assert!(t.stabilizes(&g.to_statevector().unwrap(), 1e-9).unwrap());
    }

    #[test]
    fn clifford_circuits_convert_to_framed_graphs() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..200 {
            let n = rng.random_range(1..=6);
            let mut gates = Vec::new();
            for _ in 0..rng.random_range(0..25) {
                let a = rng.random_range(0..n);
                let b = (a + rng.random_range(1..n.max(2))) % n;
                gates.push(match rng.random_range(0..6) {
                    0 => Gate::h(a),
                    1 => Gate::s(a),
                    2 => Gate::x(a),
                    3 if n > 1 => Gate::cx(a, b),
                    4 if n > 1 => Gate::cz(a, b),
                    _ => Gate::sdg(a),
                });
            }
            let mut dense = PureState::new(n, Fill::AllZero).unwrap();
            let mut tableau = StabilizerTableau::zero_state(n);
            for g in &gates {
                dense.apply(g).unwrap();
                tableau.apply(g).unwrap();
            }
            assert!(tableau.stabilizes(&dense, 1e-9).unwrap());
            let g = graph_from_clifford_gates(n, &gates).unwrap();
            assert!((fid(&g.to_statevector().unwrap(), &dense) - 1.0).abs() < 1e-9, "{gates:?}");
        }
    }

    #[test]
    fn bell_pair_is_a_framed_edge() {
        let g = graph_from_clifford_gates(2, &[Gate::h(0), Gate::cx(0, 1)]).unwrap();
        assert_eq!(g.edges(), vec![(0, 1)]);
        let frames = [g.frame(0), g.frame(1)];
        assert!(frames.iter().filter(|c| !c.is_identity()).count() == 1);
    }
}
