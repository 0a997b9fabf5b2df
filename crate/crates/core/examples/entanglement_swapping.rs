//! Entanglement swapping over a four-qubit chain: exact branch-by-branch
//! output, then the fidelity and CHSH value as the depolarizing rate grows.
//!
//! cargo run --example entanglement_swapping

use mqnc::analysis::{pair_chsh, ChshSettings};
use mqnc::noise::NoiseModel;
use mqnc::protocols::{build_swapping, Mode};

fn main() -> mqnc::Result<()> {
    let proto = build_swapping(None, Mode::FeedForward)?;
    println!("{} on {}: output qubits {:?}", proto.kind(), proto.topology(), proto.output());

    // Every Bell-measurement record yields |Φ+> once its Pauli byproduct is undone.
    let noiseless = NoiseModel::noiseless();
    for record in [[0, 0], [0, 1], [1, 0], [1, 1]] {
        let (p, _) = proto.branch_state(&noiseless, &record)?;
        let fix = proto.byproduct_correction(&record)?;
        println!("  record {record:?}: p = {p:.3}, correction {:?}", fix.as_pauli_string(2).map(|s| s.to_string()));
    }

    let settings = ChshSettings::default();
    println!("\n  eps      F        S");
    for eps in [0.0, 0.01, 0.02, 0.05, 0.1] {
        let out = proto.evaluate_exact(&NoiseModel::new(eps)?)?;
        let pair = &out.pairs[0];
        let s = pair_chsh(&out.pair_states()?[0], pair.target, &settings)?;
        println!("  {eps:<6}  {:.5}  {s:.5}", out.fidelity);
    }
    Ok(())
}
