//! Figures of merit for distributed pairs and noise sweeps.

mod chsh;
mod concurrence;
mod correlation;
mod fidelity;
mod sweep;
mod tomography;
mod werner;

pub use chsh::{
    chsh_from_counts, chsh_s, pair_chsh, protocol_chsh_counts, simulate_chsh_counts, ChshEstimate,
    ChshSettings, ChshTerm,
};
pub use concurrence::concurrence;
pub use correlation::{correlation_from_counts, correlation_from_state, CorrelationMatrix, MIN_CORRELATION_SHOTS};
pub use fidelity::{fidelity, fidelity_pure};
pub use sweep::{
    crit_from_curve, epsilon_crit, epsilon_sweep, CritReport, CurveCrit, PairPoint, SweepMode,
    SweepPoint, SweepResult,
};
pub use tomography::{
    all_settings, expectations_exact, protocol_setting_counts, simulate_setting_counts,
    tomography_from_counts, tomography_from_expectations, tomography_from_state, SettingCounts,
    TomographyEstimate, TomographyMethod,
};
pub use werner::{werner_s, werner_state, WernerModel, CHSH_THRESHOLD_FIDELITY};

/// Sample mean and standard error of the mean (zero for a single sample).
pub fn mean_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    if xs.is_empty() {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn mean_and_error() {
        let (m, se) = mean_stderr(&[1.0, 2.0, 3.0, 4.0]);
        assert!((m - 2.5).abs() < 1e-12);
        assert!((se - (5.0f64 / 3.0 / 4.0).sqrt()).abs() < 1e-12);
        assert_eq!(mean_stderr(&[7.0]), (7.0, 0.0));
    }
}
