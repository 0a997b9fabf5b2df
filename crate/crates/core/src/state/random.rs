//! Random states for property tests and examples.

use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;

use super::{DensityMatrix, PureState};
use crate::error::Result;

fn gaussian<R: Rng + ?Sized>(rng: &mut R) -> Complex64 {
    Complex64::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
}

/// Haar-random pure state.
pub fn random_pure<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Result<PureState> {
    PureState::from_amplitudes((0..1usize << n).map(|_| gaussian(rng)).collect())
}

/// Random mixed state `G G† / Tr(G G†)` with `G` a `2^n x rank` Ginibre matrix.
pub fn random_density<R: Rng + ?Sized>(n: usize, rank: usize, rng: &mut R) -> Result<DensityMatrix> {
    let dim = 1usize << n;
    let g: Vec<Complex64> = (0..dim * rank).map(|_| gaussian(rng)).collect();
    let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
    for r in 0..dim {
        for c in 0..dim {
            data[r * dim + c] = (0..rank).map(|k| g[r * rank + k] * g[c * rank + k].conj()).sum();
        }
    }
    let tr: f64 = (0..dim).map(|i| data[i * dim + i].re).sum();
    for a in &mut data {
        *a /= tr;
    }
    // Exact Hermiticity regardless of rounding.
    for r in 0..dim {
        data[r * dim + r].im = 0.0;
        for c in r + 1..dim {
            data[c * dim + r] = data[r * dim + c].conj();
        }
    }
    DensityMatrix::from_data(n, data)
}
