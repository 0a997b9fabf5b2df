//! Pauli-basis state tomography by linear inversion.

use num_complex::Complex64;
use rand::distr::{weighted::WeightedIndex, Distribution};
use serde::{Deserialize, Serialize};

use crate::circuit::CountsTable;
use crate::error::{Error, Result};
use crate::linalg;
use crate::noise::{derive_seed, shot_rng, NoiseModel};
use crate::pauli::{Pauli, PauliString};
use crate::protocols::ProtocolInstance;
use crate::state::{DensityMatrix, MeasurementBasis};

/// Largest register handled (81 settings, 256 Pauli terms).
pub const MAX_TOMOGRAPHY_QUBITS: usize = 4;

/// Per-qubit measurement bases of one setting and the counts it produced
/// (key character `q` is qubit `q`).
pub type SettingCounts = (Vec<MeasurementBasis>, CountsTable);

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum TomographyMethod {
    ExactExpectation,
    ShotSampled,
}

#[derive(Clone, Debug)]
pub struct TomographyEstimate {
    pub rho: DensityMatrix,
    pub method: TomographyMethod,
    pub shots_per_setting: Option<u64>,
    /// Whether negative eigenvalues were clipped.
    pub projection_applied: bool,
}

const BASES: [MeasurementBasis; 3] = [MeasurementBasis::X, MeasurementBasis::Y, MeasurementBasis::Z];
const LETTERS: [Pauli; 4] = [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z];

fn check_k(k: usize) -> Result<()> {
    if k == 0 || k > MAX_TOMOGRAPHY_QUBITS {
        return Err(Error::Tomography(format!(
            "tomography supports 1..={MAX_TOMOGRAPHY_QUBITS} qubits, got {k}"
        )));
    }
    Ok(())
}

/// All `3^k` settings, qubit 0 varying fastest.
pub fn all_settings(k: usize) -> Vec<Vec<MeasurementBasis>> {
    (0..3usize.pow(k as u32))
        .map(|mut i| {
            (0..k)
                .map(|_| {
                    let b = BASES[i % 3];
                    i /= 3;
                    b
                })
                .collect()
        })
        .collect()
}

/// Pauli string for a base-4 index (digit `q` is the letter on qubit `q`).
fn pauli_of(k: usize, mut index: usize) -> PauliString {
    PauliString::new(
        (0..k)
            .map(|_| {
                let p = LETTERS[index % 4];
                index /= 4;
                p
            })
            .collect(),
    )
}

/// All `4^k` Pauli expectations of a state, indexed as in [`pauli_of`].
pub fn expectations_exact(rho: &DensityMatrix) -> Result<Vec<f64>> {
    let k = rho.num_qubits();
    check_k(k)?;
    (0..4usize.pow(k as u32))
        .map(|i| rho.expectation(&pauli_of(k, i)))
        .collect()
}

fn invert(k: usize, exps: &[f64]) -> Vec<Complex64> {
    let dim = 1usize << k;
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for (i, &e) in exps.iter().enumerate() {
        if e == 0.0 {
            continue;
        }
        let p = pauli_of(k, i);
        let (xmask, _) = p.masks();
        for c in 0..dim {
            data[(c ^ xmask) * dim + c] += p.column_phase(c) * e;
        }
    }
    let scale = 1.0 / dim as f64;
    data.iter_mut().for_each(|v| *v *= scale);
    data
}

/// Linear inversion `rho = 2^{-k} Σ_P <P> P` from exact expectations.
pub fn tomography_from_expectations(k: usize, exps: &[f64]) -> Result<TomographyEstimate> {
    check_k(k)?;
    if exps.len() != 4usize.pow(k as u32) {
        return Err(Error::Tomography(format!(
            "expected {} expectations, got {}",
            4usize.pow(k as u32),
            exps.len()
        )));
    }
    let rho = DensityMatrix::from_data(k, invert(k, exps))?;
    Ok(TomographyEstimate {
        rho,
        method: TomographyMethod::ExactExpectation,
        shots_per_setting: None,
        projection_applied: false,
    })
}

pub fn tomography_from_state(rho: &DensityMatrix) -> Result<TomographyEstimate> {
    tomography_from_expectations(rho.num_qubits(), &expectations_exact(rho)?)
}

/// Shot-based reconstruction. Each Pauli expectation is averaged over every
/// setting that measures its support in the right bases; the estimate is
/// then clipped to the nearest positive semidefinite, unit-trace matrix.
pub fn tomography_from_counts(k: usize, data: &[SettingCounts]) -> Result<TomographyEstimate> {
    check_k(k)?;
    for s in all_settings(k) {
        match data.iter().find(|(b, _)| *b == s) {
            None => return Err(Error::Tomography(format!("missing setting {s:?}"))),
            Some((_, c)) if c.total() == 0 => {
                return Err(Error::Tomography(format!("setting {s:?} has no shots")))
            }
            Some(_) => {}
        }
    }
    let mut exps = vec![0.0; 4usize.pow(k as u32)];
    exps[0] = 1.0;
    for (i, e) in exps.iter_mut().enumerate().skip(1) {
        let p = pauli_of(k, i);
        let support: Vec<usize> = (0..k).filter(|&q| p.letters[q] != Pauli::I).collect();
        let mut sum = 0i64;
        let mut total = 0u64;
        for (bases, counts) in data {
            if support.iter().any(|&q| bases[q].as_pauli() != p.letters[q]) {
                continue;
            }
            for (key, c) in counts.iter() {
                let bits = key.as_bytes();
                let parity = support.iter().fold(0u8, |acc, &q| acc ^ (bits[q] & 1));
                sum += if parity == 0 { c as i64 } else { -(c as i64) };
            }
            total += counts.total();
        }
        *e = sum as f64 / total as f64;
    }
    let dim = 1usize << k;
    let raw = invert(k, &exps);
    let (ev, _) = linalg::hermitian_eigen(&raw, dim);
    let projection_applied = ev.iter().any(|&v| v < 0.0);
    let clipped = if projection_applied {
        let positive: f64 = ev.iter().map(|v| v.max(0.0)).sum();
        linalg::hermitian_map(&raw, dim, |v| v.max(0.0) / positive)
    } else {
        raw
    };
    let shots = data.first().map(|(_, c)| c.total());
    let uniform = data.iter().all(|(_, c)| Some(c.total()) == shots);
    Ok(TomographyEstimate {
        rho: DensityMatrix::from_data(k, clipped)?,
        method: TomographyMethod::ShotSampled,
        shots_per_setting: if uniform { shots } else { None },
        projection_applied,
    })
}

/// Samples `shots` outcomes of every setting from a known state.
pub fn simulate_setting_counts(rho: &DensityMatrix, shots: u64, seed: u64) -> Result<Vec<SettingCounts>> {
    let k = rho.num_qubits();
    check_k(k)?;
    if shots == 0 {
        return Err(Error::Tomography("shots must be positive".into()));
    }
    all_settings(k)
        .into_iter()
        .enumerate()
        .map(|(idx, bases)| {
            let mut r = rho.clone();
            for (q, b) in bases.iter().enumerate() {
                if let Some(u) = b.rotation() {
                    r.apply_matrix(q, &u)?;
                }
            }
            let probs: Vec<f64> = (0..r.dim()).map(|j| r.get(j, j).re.max(0.0)).collect();
            let dist = WeightedIndex::new(&probs)
                .map_err(|e| Error::Tomography(format!("bad outcome distribution: {e}")))?;
            let mut rng = shot_rng(seed, idx as u64);
            let mut counts = CountsTable::new();
            let mut bits = vec![0u8; k];
            for _ in 0..shots {
                let j = dist.sample(&mut rng);
                for (q, b) in bits.iter_mut().enumerate() {
                    *b = (j >> q & 1) as u8;
                }
                counts.record(&bits);
            }
            Ok((bases, counts))
        })
        .collect()
}

/// Runs every setting on a protocol's corrected output. Each group lists
/// output positions forming one tomography register; all groups must have
/// the same size and are measured simultaneously. Returns one setting list
/// per group with keys restricted to that group.
pub fn protocol_setting_counts(
    proto: &ProtocolInstance,
    noise: &NoiseModel,
    groups: &[Vec<usize>],
    shots: u64,
    seed: u64,
) -> Result<Vec<Vec<SettingCounts>>> {
    let k = groups.first().map_or(0, |g| g.len());
    check_k(k)?;
    if groups.iter().any(|g| g.len() != k) {
        return Err(Error::Tomography("tomography groups must have equal size".into()));
    }
    let width = proto.output().len();
    let mut out = vec![Vec::new(); groups.len()];
    for (idx, setting) in all_settings(k).into_iter().enumerate() {
        let mut bases = vec![MeasurementBasis::Z; width];
        for g in groups {
            for (q, &pos) in g.iter().enumerate() {
                bases[pos] = setting[q];
            }
        }
        let counts = proto.sample_output_counts(noise, shots, derive_seed(seed, idx as u64), &[], &bases)?;
        for (g, dest) in groups.iter().zip(out.iter_mut()) {
            let mut sub = CountsTable::new();
            for (key, c) in counts.iter() {
                let b = key.as_bytes();
                let restricted: String = g.iter().map(|&p| b[p] as char).collect();
                sub.add(restricted, c);
            }
            dest.push((setting.clone(), sub));
        }
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::{fidelity_pure, werner_state};
    use crate::protocols::PairTarget;
    use crate::state::random::random_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn setting_enumeration() {
        let s = all_settings(2);
        assert_eq!(s.len(), 9);
        assert_eq!(s[1], vec![MeasurementBasis::Y, MeasurementBasis::X]);
    }

    #[test]
    fn exact_inversion_is_exact() {
        let w = werner_state(0.7).unwrap();
        let est = tomography_from_state(&w).unwrap();
        assert!(est.rho.max_abs_diff(&w) < 1e-10);
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        for k in 1..=3 {
            let rho = random_density(k, 2, &mut rng).unwrap();
            let est = tomography_from_state(&rho).unwrap();
            assert!(est.rho.trace_distance(&rho).unwrap() < 1e-10);
        }
        let phi = PairTarget::PhiPlus.state();
        let est = tomography_from_state(&phi.to_density().unwrap()).unwrap();
        assert!((fidelity_pure(&est.rho, &phi).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn sampled_reconstruction_is_close() {
        let phi = PairTarget::PhiPlus.state().to_density().unwrap();
        let data = simulate_setting_counts(&phi, 8192, 9).unwrap();
        let est = tomography_from_counts(2, &data).unwrap();
        assert!(est.rho.trace_distance(&phi).unwrap() < 0.05);
        assert_eq!(est.shots_per_setting, Some(8192));
        assert!(est.rho.validate().is_ok());
    }

    #[test]
    fn missing_or_empty_settings() {
        let phi = PairTarget::PhiPlus.state().to_density().unwrap();
        let mut data = simulate_setting_counts(&phi, 100, 1).unwrap();
        data.pop();
        assert!(tomography_from_counts(2, &data).is_err());
        let mut data = simulate_setting_counts(&phi, 100, 1).unwrap();
        data[0].1 = CountsTable::new();
        assert!(tomography_from_counts(2, &data).is_err());
    }

    #[test]
    fn same_seed_same_counts() {
        let phi = PairTarget::PhiPlus.state().to_density().unwrap();
        let a = simulate_setting_counts(&phi, 500, 4).unwrap();
        let b = simulate_setting_counts(&phi, 500, 4).unwrap();
        assert!(a.iter().zip(&b).all(|(x, y)| x.1 == y.1));
    }
}
