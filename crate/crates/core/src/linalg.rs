//! Thin wrappers over nalgebra for the few dense decompositions we need.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;

pub(crate) fn to_dmatrix(data: &[Complex64], dim: usize) -> DMatrix<Complex64> {
    DMatrix::from_row_slice(dim, dim, data)
}

pub(crate) fn from_dmatrix(m: &DMatrix<Complex64>) -> Vec<Complex64> {
    let dim = m.nrows();
    let mut out = Vec::with_capacity(dim * dim);
    for r in 0..dim {
        for c in 0..dim {
            out.push(m[(r, c)]);
        }
    }
    out
}

/// Eigen-decomposition of a Hermitian matrix; the input is symmetrized first.
pub(crate) fn hermitian_eigen(data: &[Complex64], dim: usize) -> (Vec<f64>, DMatrix<Complex64>) {
    let m = to_dmatrix(data, dim);
    let h = (&m + m.adjoint()) * Complex64::new(0.5, 0.0);
    let eig = SymmetricEigen::new(h);
    (eig.eigenvalues.iter().copied().collect(), eig.eigenvectors)
}

/// Applies `f` to the spectrum of a Hermitian matrix.
pub(crate) fn hermitian_map(data: &[Complex64], dim: usize, f: impl Fn(f64) -> f64) -> Vec<Complex64> {
    let (vals, vecs) = hermitian_eigen(data, dim);
    let diag = DMatrix::from_diagonal(&nalgebra::DVector::from_iterator(
        dim,
        vals.into_iter().map(|v| Complex64::new(f(v), 0.0)),
    ));
    from_dmatrix(&(&vecs * diag * vecs.adjoint()))
}

#[cfg(test)]
/// Square root of a positive semidefinite matrix (negative rounding noise clipped).
pub(crate) fn psd_sqrt(data: &[Complex64], dim: usize) -> Vec<Complex64> {
    hermitian_map(data, dim, |v| v.max(0.0).sqrt())
}

#[cfg(test)]
pub(crate) fn matmul(a: &[Complex64], b: &[Complex64], dim: usize) -> Vec<Complex64> {
    from_dmatrix(&(to_dmatrix(a, dim) * to_dmatrix(b, dim)))
}
