use nalgebra::DMatrix;
use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::linalg;
use crate::state::{DensityMatrix, PureState};

/// Eigenvalues below this are treated as roundoff.
const NEGLIGIBLE: f64 = 1e-13;

/// `(Tr sqrt(sqrt(rho) sigma sqrt(rho)))^2` for two mixed states.
pub fn fidelity(rho: &DensityMatrix, sigma: &DensityMatrix) -> Result<f64> {
    if rho.num_qubits() != sigma.num_qubits() {
        return Err(Error::WidthMismatch {
            expected: rho.num_qubits(),
            actual: sigma.num_qubits(),
        });
    }
    rho.validate()?;
    sigma.validate()?;
    let dim = rho.dim();
    // Work on the support of rho: with W = V sqrt(D) over its non-negligible
    // eigenpairs, W† sigma W has the spectrum of sqrt(rho) sigma sqrt(rho).
    // Dropping roundoff-level eigenvalues matters because the square root
    // turns a 1e-17 residue into a 3e-9 error.
    let (values, vectors) = linalg::hermitian_eigen(rho.data(), dim);
    let support: Vec<usize> = (0..dim).filter(|&i| values[i] > NEGLIGIBLE).collect();
    let w = DMatrix::from_fn(dim, support.len(), |r, c| {
        vectors[(r, support[c])] * values[support[c]].sqrt()
    });
    let m = w.adjoint() * linalg::to_dmatrix(sigma.data(), dim) * &w;
    let (ev, _) = linalg::hermitian_eigen(&linalg::from_dmatrix(&m), support.len());
    let t: f64 = ev.iter().filter(|&&v| v > NEGLIGIBLE).map(|v| v.sqrt()).sum();
    Ok((t * t).clamp(0.0, 1.0))
}

/// `<psi| rho |psi>`.
pub fn fidelity_pure(rho: &DensityMatrix, psi: &PureState) -> Result<f64> {
    if rho.num_qubits() != psi.num_qubits() {
        return Err(Error::WidthMismatch {
            expected: rho.num_qubits(),
            actual: psi.num_qubits(),
        });
    }
    let a = psi.amplitudes();
    let dim = rho.dim();
    let data = rho.data();
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..dim {
        if a[r].norm_sqr() == 0.0 {
            continue;
        }
        let row: Complex64 = (0..dim).map(|c| data[r * dim + c] * a[c]).sum();
        acc += a[r].conj() * row;
    }
    Ok(acc.re.clamp(0.0, 1.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state::Fill;

    #[test]
    fn orthogonal_and_identical() {
        let zero = PureState::basis(1, 0).unwrap();
        let one = PureState::basis(1, 1).unwrap();
        let rz = zero.to_density().unwrap();
        assert!(fidelity_pure(&rz, &one).unwrap() < 1e-15);
        assert!((fidelity(&rz, &rz).unwrap() - 1.0).abs() < 1e-12);
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        assert!((fidelity(&mixed, &mixed).unwrap() - 1.0).abs() < 1e-9);
    }

    #[test]
    fn pure_shortcut_matches_general_form() {
        let plus = PureState::new(2, Fill::AllPlus).unwrap();
        let mixed = DensityMatrix::maximally_mixed(2).unwrap();
        let general = fidelity(&mixed, &plus.to_density().unwrap()).unwrap();
        assert!((general - 0.25).abs() < 1e-12);
        assert!((fidelity_pure(&mixed, &plus).unwrap() - 0.25).abs() < 1e-12);
    }

    #[test]
    fn width_mismatch() {
        let a = DensityMatrix::maximally_mixed(1).unwrap();
        let b = DensityMatrix::maximally_mixed(2).unwrap();
        assert!(fidelity(&a, &b).is_err());
    }
}
