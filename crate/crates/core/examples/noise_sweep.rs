//! Sweeps the depolarizing rate for the six-qubit network-coding stage and
//! locates where each pair's CHSH value drops below the classical bound.
//!
//! cargo run --release --example noise_sweep

use mqnc::analysis::{epsilon_sweep, werner_s, SweepMode, CHSH_THRESHOLD_FIDELITY};
use mqnc::noise::NoiseModel;
use mqnc::protocols::{build_mqnc, Mode, MqncStage};

fn main() -> mqnc::Result<()> {
    let proto = build_mqnc(MqncStage::Step2Onward, None, Mode::FeedForward)?;
    let grid: Vec<f64> = (0..=20).map(|k| k as f64 * 0.0025).collect();
    let sweep = epsilon_sweep(&proto, &grid, SweepMode::Exact, &NoiseModel::noiseless(), 0)?;

    println!("  eps      pair   F        S        Werner S(F)");
    for p in sweep.points.iter().step_by(4) {
        for q in &p.pairs {
            println!(
                "  {:<7}  {:5}  {:.5}  {:.5}  {:.5}",
                p.epsilon,
                q.label,
                q.fidelity,
                q.s,
                werner_s(q.fidelity)
            );
        }
    }
    for c in &sweep.epsilon_crit.per_pair {
        println!("{}: eps_crit = {:?}", c.label, c.value);
    }
    println!(
        "headline eps_crit = {:?}; a Werner pair violates CHSH above F = {CHSH_THRESHOLD_FIDELITY:.5}",
        sweep.epsilon_crit.value
    );
    Ok(())
}
