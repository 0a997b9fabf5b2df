//! Two-qubit Pauli tomography: exact reconstruction, then shot-sampled
//! linear inversion with projection back onto physical states.
//!
//! cargo run --release --example tomography

use mqnc::analysis::{fidelity_pure, simulate_setting_counts, tomography_from_counts, tomography_from_state, werner_state};
use mqnc::protocols::PairTarget;

fn main() -> mqnc::Result<()> {
    let rho = werner_state(0.85)?;
    let g2 = PairTarget::G2.state();

    let exact = tomography_from_state(&rho)?;
    println!("exact: trace distance {:.2e}", exact.rho.trace_distance(&rho)?);

    for shots in [128, 1024, 8192] {
        let data = simulate_setting_counts(&rho, shots, 3)?;
        let est = tomography_from_counts(2, &data)?;
        println!(
            "{shots:>5} shots/setting: trace distance {:.4}, F(G2) = {:.4}, projected: {}",
            est.rho.trace_distance(&rho)?,
            fidelity_pure(&est.rho, &g2)?,
            est.projection_applied
        );
    }
    Ok(())
}
