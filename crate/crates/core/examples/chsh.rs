//! CHSH values of Werner states, exact and sampled, against the closed form.
//!
//! cargo run --release --example chsh

use mqnc::analysis::{chsh_from_counts, pair_chsh, simulate_chsh_counts, werner_s, werner_state, ChshSettings};
use mqnc::protocols::PairTarget;

fn main() -> mqnc::Result<()> {
    let settings = ChshSettings::default();
    println!("  F      closed form  exact    sampled (8192 shots/term)");
    for f in [0.25, 0.5, 0.75, 0.78, 0.8, 0.9, 1.0] {
        let rho = werner_state(f)?;
        let exact = pair_chsh(&rho, PairTarget::G2, &settings)?;
        let counts = simulate_chsh_counts(&rho, PairTarget::G2, &settings, 8192, 11)?;
        let est = chsh_from_counts(&settings, &counts, [0, 1])?;
        println!(
            "  {f:<5}  {:.5}      {exact:.5}  {:.4} ± {:.4}",
            werner_s(f),
            est.s,
            est.stderr
        );
    }
    Ok(())
}
