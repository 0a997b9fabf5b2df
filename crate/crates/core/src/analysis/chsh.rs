use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::circuit::CountsTable;
use crate::error::{Error, Result};
use crate::gate::{self, adjoint2, matmul2, Mat2};
use crate::noise::{derive_seed, shot_rng, NoiseModel};
use crate::protocols::{PairTarget, ProtocolInstance};
use crate::state::{DensityMatrix, MeasurementBasis};
use rand::distr::{weighted::WeightedIndex, Distribution};

/// Observables `A, A'` (first qubit) and `B, B'` (second qubit) of
/// `S = <AB> − <AB'> + <A'B> + <A'B'>`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshSettings {
    pub a: Mat2,
    pub a_prime: Mat2,
    pub b: Mat2,
    pub b_prime: Mat2,
}

impl Default for ChshSettings {
    /// `A = X`, `A' = Z`, `B = H`, `B' = ZHZ`: maximal violation on `|Φ+>`.
    fn default() -> Self {
        ChshSettings {
            a: gate::X,
            a_prime: gate::Z,
            b: gate::H,
            b_prime: matmul2(&gate::Z, &matmul2(&gate::H, &gate::Z)),
        }
    }
}

/// One correlator of the CHSH sum.
#[derive(Clone, Copy, Debug)]
pub struct ChshTerm {
    pub sign: f64,
    /// Rotation taking the first observable's eigenbasis to the computational basis.
    pub rotate_first: Mat2,
    pub rotate_second: Mat2,
}

fn is_pm_one_observable(m: &Mat2) -> bool {
    let hermitian = (0..2).all(|i| (0..2).all(|j| (m[i][j] - m[j][i].conj()).norm() < 1e-9));
    let sq = matmul2(m, m);
    let unit = (0..2).all(|i| (0..2).all(|j| (sq[i][j] - gate::I2[i][j]).norm() < 1e-9));
    hermitian && unit
}

/// Unitary `V` with `V M V† = Z`, for a ±1-valued observable `M`.
fn diagonalizer(m: &Mat2) -> Mat2 {
    let column = |sign: f64| -> [Complex64; 2] {
        // Non-zero column of the projector (I + sign·M)/2.
        let p = |i: usize, j: usize| (gate::I2[i][j] + m[i][j] * sign) * 0.5;
        let j = if p(0, 0).norm() + p(1, 0).norm() > 0.5 { 0 } else { 1 };
        let v = [p(0, j), p(1, j)];
        let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
        [v[0] / norm, v[1] / norm]
    };
    let (plus, minus) = (column(1.0), column(-1.0));
    // U has the eigenvectors as columns; V = U†.
    let u = [[plus[0], minus[0]], [plus[1], minus[1]]];
    adjoint2(&u)
}

impl ChshSettings {
    pub fn validate(&self) -> Result<()> {
        for (name, m) in [("A", &self.a), ("A'", &self.a_prime), ("B", &self.b), ("B'", &self.b_prime)] {
            if !is_pm_one_observable(m) {
                return Err(Error::InvalidObservable(format!(
                    "{name} must be Hermitian with eigenvalues ±1"
                )));
            }
        }
        Ok(())
    }

    /// The four correlators in the order `AB, AB', A'B, A'B'`.
    pub fn terms(&self) -> [ChshTerm; 4] {
        let t = |sign, x: &Mat2, y: &Mat2| ChshTerm {
            sign,
            rotate_first: diagonalizer(x),
            rotate_second: diagonalizer(y),
        };
        [
            t(1.0, &self.a, &self.b),
            t(-1.0, &self.a, &self.b_prime),
            t(1.0, &self.a_prime, &self.b),
            t(1.0, &self.a_prime, &self.b_prime),
        ]
    }
}

/// Exact `S = Tr(rho · (AB − AB' + A'B + A'B'))`.
pub fn chsh_s(rho: &DensityMatrix, settings: &ChshSettings) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::Analysis(format!(
            "CHSH needs a 2-qubit state, got {} qubits",
            rho.num_qubits()
        )));
    }
    settings.validate()?;
    let e = |x: &Mat2, y: &Mat2| rho.expectation_local(&[(0, *x), (1, *y)]);
    Ok(e(&settings.a, &settings.b)? - e(&settings.a, &settings.b_prime)?
        + e(&settings.a_prime, &settings.b)?
        + e(&settings.a_prime, &settings.b_prime)?)
}

/// CHSH value of a distributed pair, evaluated after the local transform
/// that maps its target onto `|Φ+>`.
pub fn pair_chsh(rho: &DensityMatrix, target: PairTarget, settings: &ChshSettings) -> Result<f64> {
    let mut r = rho.clone();
    for (q, u) in target.bell_transform() {
        r.apply_matrix(q, &u)?;
    }
    chsh_s(&r, settings)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ChshEstimate {
    pub s: f64,
    pub stderr: f64,
    pub shots_per_term: [u64; 4],
}

/// Estimates `S` from computational-basis counts of the four correlators
/// (in [`ChshSettings::terms`] order). `positions` selects the two key
/// characters holding the pair's bits.
pub fn chsh_from_counts(
    settings: &ChshSettings,
    counts: &[CountsTable; 4],
    positions: [usize; 2],
) -> Result<ChshEstimate> {
    let mut s = 0.0;
    let mut var = 0.0;
    let mut shots = [0u64; 4];
    for (k, (term, table)) in settings.terms().iter().zip(counts).enumerate() {
        let n = table.total();
        if n == 0 {
            return Err(Error::Analysis(format!("CHSH term {k} has no shots")));
        }
        let mut sum = 0i64;
        for (key, c) in table.iter() {
            let bits = key.as_bytes();
            let parity = (bits[positions[0]] ^ bits[positions[1]]) & 1;
            sum += if parity == 0 { c as i64 } else { -(c as i64) };
        }
        let e = sum as f64 / n as f64;
        s += term.sign * e;
        var += (1.0 - e * e) / n as f64;
        shots[k] = n;
    }
    Ok(ChshEstimate {
        s,
        stderr: var.sqrt(),
        shots_per_term: shots,
    })
}

/// Samples the four correlators of a two-qubit state (after its Bell
/// transform); term `k` uses random stream `k` of `seed`.
pub fn simulate_chsh_counts(
    rho: &DensityMatrix,
    target: PairTarget,
    settings: &ChshSettings,
    shots: u64,
    seed: u64,
) -> Result<[CountsTable; 4]> {
    settings.validate()?;
    if shots == 0 {
        return Err(Error::Analysis("shots must be positive".into()));
    }
    let mut out: [CountsTable; 4] = Default::default();
    for (k, term) in settings.terms().iter().enumerate() {
        let mut r = rho.clone();
        for (q, u) in target.bell_transform() {
            r.apply_matrix(q, &u)?;
        }
        r.apply_matrix(0, &term.rotate_first)?;
        r.apply_matrix(1, &term.rotate_second)?;
        let probs: Vec<f64> = (0..4).map(|j| r.get(j, j).re.max(0.0)).collect();
        let dist = WeightedIndex::new(&probs)
            .map_err(|e| Error::Analysis(format!("bad outcome distribution: {e}")))?;
        let mut rng = shot_rng(seed, k as u64);
        for _ in 0..shots {
            let j = dist.sample(&mut rng);
            out[k].record(&[(j & 1) as u8, (j >> 1 & 1) as u8]);
        }
    }
    Ok(out)
}

/// Samples the four correlators on every pair of a protocol's corrected
/// output at once (keys span the whole output register).
pub fn protocol_chsh_counts(
    proto: &ProtocolInstance,
    noise: &NoiseModel,
    settings: &ChshSettings,
    shots: u64,
    seed: u64,
) -> Result<[CountsTable; 4]> {
    settings.validate()?;
    let bases = vec![MeasurementBasis::Z; proto.output().len()];
    let mut out: [CountsTable; 4] = Default::default();
    for (k, term) in settings.terms().iter().enumerate() {
        let mut rotations = Vec::new();
        for pair in proto.pairs() {
            for (q, u) in pair.target.bell_transform() {
                rotations.push((pair.positions[q], u));
            }
            rotations.push((pair.positions[0], term.rotate_first));
            rotations.push((pair.positions[1], term.rotate_second));
        }
        out[k] = proto.sample_output_counts(noise, shots, derive_seed(seed, k as u64), &rotations, &bases)?;
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::werner_state;
    use crate::state::random::random_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn phi() -> DensityMatrix {
        PairTarget::PhiPlus.state().to_density().unwrap()
    }

    #[test]
    fn tsirelson_on_phi_plus() {
        let s = chsh_s(&phi(), &ChshSettings::default()).unwrap();
        assert!((s - 2.0 * std::f64::consts::SQRT_2).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(chsh_s(&mixed, &ChshSettings::default()).unwrap().abs() < 1e-12);
    }

    #[test]
    fn sampled_estimate_within_errors() {
        let set = ChshSettings::default();
        let counts = simulate_chsh_counts(&phi(), PairTarget::PhiPlus, &set, 8192, 3).unwrap();
        let est = chsh_from_counts(&set, &counts, [0, 1]).unwrap();
        assert!((est.s - 2.0 * std::f64::consts::SQRT_2).abs() < 4.0 * est.stderr + 1e-9);
        assert_eq!(est.shots_per_term, [8192; 4]);
    }

    #[test]
    fn werner_half() {
        let s = pair_chsh(&werner_state(0.5).unwrap(), PairTarget::G2, &ChshSettings::default()).unwrap();
        assert!((s - 2.0 * std::f64::consts::SQRT_2 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn linear_in_state() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let set = ChshSettings::default();
        for _ in 0..10 {
            let a = random_density(2, 4, &mut rng).unwrap();
            let b = random_density(2, 1, &mut rng).unwrap();
            let p = 0.3;
            let mix = a.mix(&b, p).unwrap();
            let lhs = chsh_s(&mix, &set).unwrap();
            let rhs = p * chsh_s(&a, &set).unwrap() + (1.0 - p) * chsh_s(&b, &set).unwrap();
            assert!((lhs - rhs).abs() < 1e-9);
            assert!(lhs <= 2.0 * std::f64::consts::SQRT_2 + 1e-6);
        }
    }

    #[test]
    fn invalid_observable_rejected() {
        let mut set = ChshSettings::default();
        set.b = gate::S;
        assert!(matches!(chsh_s(&phi(), &set), Err(Error::InvalidObservable(_))));
        assert!(chsh_s(&DensityMatrix::maximally_mixed(1).unwrap(), &ChshSettings::default()).is_err());
    }

    #[test]
    fn diagonalizers_map_observables_to_z() {
        let set = ChshSettings::default();
        for m in [set.a, set.a_prime, set.b, set.b_prime] {
            let v = diagonalizer(&m);
            let d = matmul2(&v, &matmul2(&m, &adjoint2(&v)));
            for i in 0..2 {
                for j in 0..2 {
                    assert!((d[i][j] - gate::Z[i][j]).norm() < 1e-12);
                }
            }
        }
    }
}
