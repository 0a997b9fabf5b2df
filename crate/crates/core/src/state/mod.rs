//! Dense n-qubit states.
//!
//! Amplitude index bit `q` holds the value of qubit `q`, so qubit 0 is the
//! least-significant bit. A density matrix is stored row-major; seen as a
//! vector over `2n` qubits its column index occupies the low `n` bits and
//! its row index the high `n` bits, which lets both representations share
//! the same gate kernels.

mod density;
pub(crate) mod kernel;
mod pure;
pub mod random;

pub use density::DensityMatrix;
pub use pure::PureState;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{self, Mat2};

/// Position of a qubit within a register.
pub type QubitIndex = usize;

/// Largest register a [`PureState`] may hold by default.
pub const MAX_PURE_QUBITS: usize = 20;
/// Largest register a [`DensityMatrix`] may hold by default.
pub const MAX_DENSITY_QUBITS: usize = 10;

/// Branches with probability under this value cannot be forced.
pub const MIN_BRANCH_PROBABILITY: f64 = 1e-12;

/// Initial product state for [`PureState::new`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Fill {
    AllZero,
    AllPlus,
}

/// Single-qubit Pauli measurement axis.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum MeasurementBasis {
    X,
    Y,
    Z,
}

impl MeasurementBasis {
    /// Rotation taking the +1 eigenvector of the axis to `|0>`.
    ///
    /// X uses `H`; Y uses `H S†` (S† first).
    pub fn rotation(self) -> Option<Mat2> {
        match self {
            MeasurementBasis::Z => None,
            MeasurementBasis::X => Some(gate::H),
            MeasurementBasis::Y => Some(gate::matmul2(&gate::H, &gate::SDG)),
        }
    }

    pub fn as_pauli(self) -> crate::pauli::Pauli {
        match self {
            MeasurementBasis::X => crate::pauli::Pauli::X,
            MeasurementBasis::Y => crate::pauli::Pauli::Y,
            MeasurementBasis::Z => crate::pauli::Pauli::Z,
        }
    }
}

/// Outcome of sampling a single-qubit measurement.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Measurement {
    pub outcome: u8,
    pub probability: f64,
}

pub(crate) fn check_width(n: usize, limit: usize) -> Result<()> {
    if n == 0 || n > limit {
        return Err(Error::InvalidWidth { width: n, limit });
    }
    Ok(())
}

pub(crate) fn check_qubit(q: QubitIndex, n: usize) -> Result<()> {
    if q >= n {
        return Err(Error::QubitOutOfRange { qubit: q, width: n });
    }
    Ok(())
}

/// Validates a list of distinct, in-range qubits.
pub(crate) fn check_qubit_list(qubits: &[QubitIndex], n: usize) -> Result<()> {
    if qubits.is_empty() {
        return Err(Error::EmptyQubitList);
    }
    let mut seen = vec![false; n];
    for &q in qubits {
        check_qubit(q, n)?;
        if seen[q] {
            return Err(Error::DuplicateQubit(q));
        }
        seen[q] = true;
    }
    Ok(())
}

/// For an ordered keep-list, returns the full-register offsets of every
/// assignment of the kept qubits and of the traced-out qubits.
pub(crate) fn scatter_tables(keep: &[QubitIndex], n: usize) -> (Vec<usize>, Vec<usize>) {
    let traced: Vec<usize> = (0..n).filter(|q| !keep.contains(q)).collect();
    let scatter = |qubits: &[usize]| -> Vec<usize> {
        (0..1usize << qubits.len())
            .map(|a| {
                qubits
                    .iter()
                    .enumerate()
                    .filter(|(bit, _)| a >> bit & 1 == 1)
                    .fold(0usize, |acc, (_, &q)| acc | 1 << q)
            })
            .collect()
    };
    (scatter(keep), scatter(&traced))
}
