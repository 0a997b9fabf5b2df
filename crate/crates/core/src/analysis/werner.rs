use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::protocols::PairTarget;
use crate::state::DensityMatrix;

/// Fidelity above which the rotated Werner state violates the CHSH
/// inequality under the default settings, `(1 + 3/√2)/4 ≈ 0.7803`
/// (commonly rounded to 0.78).
pub const CHSH_THRESHOLD_FIDELITY: f64 = (1.0 + 3.0 * std::f64::consts::FRAC_1_SQRT_2) / 4.0;

/// Two-vertex graph state mixed with white noise, parameterized by its
/// fidelity with that graph state.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WernerModel {
    pub fidelity: f64,
}

impl WernerModel {
    pub fn new(fidelity: f64) -> Result<Self> {
        if !(0.25..=1.0).contains(&fidelity) {
            return Err(Error::Analysis(format!(
                "Werner fidelity must lie in [1/4, 1], got {fidelity}"
            )));
        }
        Ok(WernerModel { fidelity })
    }

    pub fn state(&self) -> DensityMatrix {
        let f = self.fidelity;
        let g2 = PairTarget::G2.state();
        let a = g2.amplitudes();
        let p = (4.0 * f - 1.0) / 3.0;
        let noise = (1.0 - f) / 3.0;
        let mut data = vec![Complex64::new(0.0, 0.0); 16];
        for r in 0..4 {
            for c in 0..4 {
                data[r * 4 + c] = a[r] * a[c].conj() * p;
            }
            data[r * 4 + r] += noise;
        }
        DensityMatrix::from_data(2, data).expect("Werner state is valid")
    }

    /// CHSH value under the default settings, evaluated after the Bell
    /// transform: `2√2 (4F − 1)/3`.
    pub fn chsh(&self) -> f64 {
        2.0 * std::f64::consts::SQRT_2 * (4.0 * self.fidelity - 1.0) / 3.0
    }
}

pub fn werner_state(fidelity: f64) -> Result<DensityMatrix> {
    Ok(WernerModel::new(fidelity)?.state())
}

pub fn werner_s(fidelity: f64) -> f64 {
    WernerModel { fidelity }.chsh()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{fidelity_pure, pair_chsh, ChshSettings};

    #[test]
    fn endpoints() {
        let one = werner_state(1.0).unwrap();
        let g2 = PairTarget::G2.state().to_density().unwrap();
        assert!(one.max_abs_diff(&g2) < 1e-15);
        let quarter = werner_state(0.25).unwrap();
        assert!(quarter.max_abs_diff(&DensityMatrix::maximally_mixed(2).unwrap()) < 1e-15);
        assert!(werner_state(0.2).is_err());
        assert!(werner_state(1.01).is_err());
    }

    #[test]
    fn fidelity_parameter_is_fidelity() {
        for k in 0..=15 {
            let f = 0.25 + 0.05 * k as f64;
            let rho = werner_state(f).unwrap();
            assert!((fidelity_pure(&rho, &PairTarget::G2.state()).unwrap() - f).abs() < 1e-12);
        }
    }

    #[test]
    fn closed_form_chsh_matches_trace() {
        for f in [0.25, 0.5, 0.78, 0.9, 1.0] {
            let s = pair_chsh(&werner_state(f).unwrap(), PairTarget::G2, &ChshSettings::default()).unwrap();
            assert!((s - werner_s(f)).abs() < 1e-12);
        }
        assert!((werner_s(CHSH_THRESHOLD_FIDELITY) - 2.0).abs() < 1e-12);
        assert!(werner_s(0.25).abs() < 1e-15);
    }
}
