use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::DensityMatrix;

/// Wootters concurrence of a two-qubit state.
///
/// With `rho = W W†` (columns of `W` are eigenvectors scaled by the square
/// roots of their eigenvalues), the square roots of the eigenvalues of
/// `rho · rho~` are the singular values of `W^T (Y ⊗ Y) W`. Working with
/// singular values avoids taking square roots of near-zero eigenvalues,
/// which would amplify rounding errors on nearly pure states.
pub fn concurrence(rho: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != 2 {
        return Err(Error::Analysis(format!(
            "concurrence needs a 2-qubit state, got {} qubits",
            rho.num_qubits()
        )));
    }
    rho.validate()?;
    let (values, vectors) = linalg::hermitian_eigen(rho.data(), 4);
    let mut w = vectors;
    for (k, mu) in values.iter().enumerate() {
        let scale = mu.max(0.0).sqrt();
        w.column_mut(k).iter_mut().for_each(|z| *z *= scale);
    }
    let flip = linalg::to_dmatrix(&Y_Y, 4);
    let tau = w.transpose() * flip * &w;
    let mut lambda: Vec<f64> = tau.singular_values().iter().copied().collect();
    lambda.sort_by(|a, b| b.total_cmp(a));
    Ok((lambda[0] - lambda[1] - lambda[2] - lambda[3]).max(0.0))
}

/// `Y ⊗ Y`, row-major: `|j> → ±|3 - j>`.
const Y_Y: [Complex64; 16] = {
    let z = Complex64::new(0.0, 0.0);
    let p = Complex64::new(1.0, 0.0);
    let m = Complex64::new(-1.0, 0.0);
    [z, z, z, m, z, z, p, z, z, p, z, z, m, z, z, z]
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::analysis::werner_state;
    use crate::protocols::PairTarget;
    use crate::state::random::random_density;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// `(Y ⊗ Y) rho* (Y ⊗ Y)`.
    fn spin_flip(rho: &DensityMatrix) -> Vec<Complex64> {
        // Y⊗Y maps |j> to ±|3 - j>, with sign + for j ∈ {0, 3} and − otherwise.
        let sign = |j: usize| if j == 0 || j == 3 { 1.0 } else { -1.0 };
        let mut out = vec![Complex64::new(0.0, 0.0); 16];
        for r in 0..4 {
            for c in 0..4 {
                out[r * 4 + c] = rho.get(3 - r, 3 - c).conj() * (sign(3 - r) * sign(3 - c));
            }
        }
        out
    }

    /// Concurrence through the nested square roots `sqrt(sqrt(rho) rho~ sqrt(rho))`.
    fn concurrence_by_roots(rho: &DensityMatrix) -> f64 {
        let root = linalg::psd_sqrt(rho.data(), 4);
        let inner = linalg::matmul(&linalg::matmul(&root, &spin_flip(rho), 4), &root, 4);
        let (mut ev, _) = linalg::hermitian_eigen(&linalg::psd_sqrt(&inner, 4), 4);
        ev.sort_by(|a, b| b.total_cmp(a));
        (ev[0] - ev[1] - ev[2] - ev[3]).max(0.0)
    }

    #[test]
    fn reference_states() {
        let phi = PairTarget::PhiPlus.state().to_density().unwrap();
        assert!((concurrence(&phi).unwrap() - 1.0).abs() < 1e-9);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(concurrence(&mixed).unwrap().abs() < 1e-9);
        assert!(concurrence(&DensityMatrix::maximally_mixed(1).unwrap()).is_err());
    }

    #[test]
    fn werner_closed_form() {
        for k in 0..=15 {
            let f = 0.25 + 0.05 * k as f64;
            let c = concurrence(&werner_state(f).unwrap()).unwrap();
            assert!((c - (2.0 * f - 1.0).max(0.0)).abs() < 1e-9, "F={f}: C={c}");
        }
    }

    #[test]
    fn agrees_with_nested_roots_on_random_states() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for rank in [1, 2, 4] {
            for _ in 0..20 {
                let rho = random_density(2, rank, &mut rng).unwrap();
                let a = concurrence(&rho).unwrap();
                let b = concurrence_by_roots(&rho);
                assert!((a - b).abs() < 1e-7, "rank {rank}: {a} vs {b}");
            }
        }
    }
}
