//! Pauli measurements on graph states, tracked symbolically. The rewrite
//! result is checked against a dense state-vector simulation.
//!
//! cargo run --example graph_oracle

use mqnc::graph::graph_from_edges;
use mqnc::{MeasurementBasis, PureState};

fn main() -> mqnc::Result<()> {
    // A 5-vertex ring; measure vertex 0 in Y and vertex 2 in X.
    let ring = [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)];
    let mut g = graph_from_edges(5, &ring)?;
    let mut dense = g.to_statevector()?;
    println!("start: edges {:?}", g.edges());

    let mut alive: Vec<usize> = (0..5).collect();
    for (v, basis, outcome) in [(0, MeasurementBasis::Y, 1), (2, MeasurementBasis::X, 0)] {
        let p = g.measure(v, basis, outcome)?;
        let k = alive.iter().position(|&u| u == v).unwrap();
        dense.measure_forced(k, basis, outcome)?;
        dense = dense.discard_qubit(k, outcome)?;
        alive.remove(k);
        println!("measure {v} in {basis:?} -> {outcome} (p = {p}): edges {:?}", g.edges());
    }
    for v in g.vertices() {
        println!("  frame on {v}: {:?}", g.frame(v).gates());
    }

    let oracle: PureState = g.to_statevector()?;
    println!("overlap with dense simulation: {:.12}", oracle.overlap(&dense)?);
    Ok(())
}
