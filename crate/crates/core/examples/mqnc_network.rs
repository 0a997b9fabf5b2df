//! Measurement-based network coding on the butterfly network: two crossing
//! Bell-type pairs (s1–t1, s2–t2) through a shared bottleneck.
//!
//! Runs the six-qubit stage exactly, then the full fourteen-qubit circuit by
//! trajectory sampling, and prints the output's ZZ correlation matrix.
//!
//! cargo run --release --example mqnc_network

use mqnc::analysis::{correlation_from_counts, pair_chsh, ChshSettings};
use mqnc::noise::NoiseModel;
use mqnc::protocols::{build_mqnc, classical_butterfly, Mode, MqncStage};
use mqnc::{gate, MeasurementBasis};

fn main() -> mqnc::Result<()> {
    println!("classical butterfly: the bottleneck carries x^y; sinks decode (t1, t2)");
    for (x, y) in [(0, 0), (0, 1), (1, 0), (1, 1)] {
        println!("  ({x}, {y}) -> {:?}", classical_butterfly(x, y));
    }

    let step2 = build_mqnc(MqncStage::Step2Onward, None, Mode::FeedForward)?;
    let settings = ChshSettings::default();
    for eps in [0.0, 0.01, 0.03] {
        let out = step2.evaluate_exact(&NoiseModel::new(eps)?)?;
        let states = out.pair_states()?;
        print!("eps = {eps}:");
        for (pair, rho) in out.pairs.iter().zip(&states) {
            let f = mqnc::analysis::fidelity_pure(rho, &pair.target.state())?;
            print!("  {} F = {f:.4} S = {:.4}", pair.label, pair_chsh(rho, pair.target, &settings)?);
        }
        println!();
    }

    let full = build_mqnc(MqncStage::Full, None, Mode::FeedForward)?;
    let out = full.evaluate_trajectories(&NoiseModel::new(0.01)?, 2000, 7)?;
    println!(
        "full circuit ({} qubits, {} measurements), eps = 0.01: F = {:.4} ± {:.4}",
        full.circuit().num_qubits(),
        full.circuit().num_clbits(),
        out.fidelity,
        out.fidelity_stderr.unwrap_or(0.0)
    );

    // H on each pair's second qubit maps |G_2> to |Φ+>, so ZZ shows the pairing.
    let counts = step2.sample_output_counts(
        &NoiseModel::noiseless(),
        4096,
        1,
        &[(1, gate::H), (3, gate::H)],
        &[MeasurementBasis::Z; 4],
    )?;
    let corr = correlation_from_counts(&counts)?;
    let roles: Vec<&str> = step2.output().iter().map(|&q| step2.roles()[q].as_str()).collect();
    println!("ZZ correlations over {roles:?}:");
    for row in &corr.values {
        println!("  {}", row.iter().map(|v| format!("{v:+.3}")).collect::<Vec<_>>().join(" "));
    }
    Ok(())
}
