//! Measurement-based transport along a linear cluster: X measurements on
//! the interior of an n-qubit chain leave the two ends in a two-vertex graph
//! state, with the byproducts tracked by the graph rewrite rules.
//!
//! cargo run --example linear_mbqc

use mqnc::noise::NoiseModel;
use mqnc::protocols::{build_linear_mbqc, Mode};

fn main() -> mqnc::Result<()> {
    for n in [3, 4, 6, 8] {
        let proto = build_linear_mbqc(n, None, Mode::FeedForward)?;
        let clean = proto.evaluate_exact(&NoiseModel::noiseless())?;
        let noisy = proto.evaluate_exact(&NoiseModel::new(0.02)?)?;
        let g = proto.graph_after(&vec![0; proto.circuit().num_clbits()])?;
        println!(
            "n = {n}: {} measurements, F = {:.6} noiseless, {:.5} at eps = 0.02; ends {:?} joined: {}",
            proto.circuit().num_clbits(),
            clean.fidelity,
            noisy.fidelity,
            g.vertices(),
            g.edges().len() == 1,
        );
    }
    Ok(())
}
