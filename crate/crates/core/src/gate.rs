//! The gate set used by the protocol circuits.

use std::f64::consts::FRAC_1_SQRT_2;
use std::fmt;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::state::QubitIndex;

/// Row-major 2x2 complex matrix.
pub type Mat2 = [[Complex64; 2]; 2];

const fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub const I2: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(1.0, 0.0)]];
pub const X: Mat2 = [[c(0.0, 0.0), c(1.0, 0.0)], [c(1.0, 0.0), c(0.0, 0.0)]];
pub const Y: Mat2 = [[c(0.0, 0.0), c(0.0, -1.0)], [c(0.0, 1.0), c(0.0, 0.0)]];
pub const Z: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(-1.0, 0.0)]];
pub const H: Mat2 = [
    [c(FRAC_1_SQRT_2, 0.0), c(FRAC_1_SQRT_2, 0.0)],
    [c(FRAC_1_SQRT_2, 0.0), c(-FRAC_1_SQRT_2, 0.0)],
];
pub const S: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, 1.0)]];
pub const SDG: Mat2 = [[c(1.0, 0.0), c(0.0, 0.0)], [c(0.0, 0.0), c(0.0, -1.0)]];

pub fn matmul2(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[Complex64::new(0.0, 0.0); 2]; 2];
    for (i, row) in out.iter_mut().enumerate() {
        for (j, cell) in row.iter_mut().enumerate() {
            *cell = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

pub fn adjoint2(m: &Mat2) -> Mat2 {
    [
        [m[0][0].conj(), m[1][0].conj()],
        [m[0][1].conj(), m[1][1].conj()],
    ]
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum GateKind {
    H,
    X,
    Y,
    Z,
    S,
    Sdg,
    CX,
    CZ,
    Swap,
}

impl GateKind {
    pub fn arity(self) -> usize {
        match self {
            GateKind::CX | GateKind::CZ | GateKind::Swap => 2,
            _ => 1,
        }
    }

    /// Matrix of a single-qubit kind.
    pub fn matrix(self) -> Option<Mat2> {
        Some(match self {
            GateKind::H => H,
            GateKind::X => X,
            GateKind::Y => Y,
            GateKind::Z => Z,
            GateKind::S => S,
            GateKind::Sdg => SDG,
            _ => return None,
        })
    }
}

/// A gate bound to its target qubits. For `CX` the first target is the control.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Gate {
    kind: GateKind,
    targets: [QubitIndex; 2],
}

impl Gate {
    pub fn new(kind: GateKind, targets: &[QubitIndex]) -> Result<Self> {
        if targets.len() != kind.arity() {
            return Err(Error::Protocol(format!(
                "{kind:?} takes {} target(s), got {}",
                kind.arity(),
                targets.len()
            )));
        }
        if kind.arity() == 2 && targets[0] == targets[1] {
            return Err(Error::DuplicateQubit(targets[0]));
        }
        let second = if kind.arity() == 2 { targets[1] } else { targets[0] };
        Ok(Gate {
            kind,
            targets: [targets[0], second],
        })
    }

    fn one(kind: GateKind, q: QubitIndex) -> Self {
        Gate {
            kind,
            targets: [q, q],
        }
    }

    pub fn h(q: QubitIndex) -> Self {
        Self::one(GateKind::H, q)
    }
    pub fn x(q: QubitIndex) -> Self {
        Self::one(GateKind::X, q)
    }
    pub fn y(q: QubitIndex) -> Self {
        Self::one(GateKind::Y, q)
    }
    pub fn z(q: QubitIndex) -> Self {
        Self::one(GateKind::Z, q)
    }
    pub fn s(q: QubitIndex) -> Self {
        Self::one(GateKind::S, q)
    }
    pub fn sdg(q: QubitIndex) -> Self {
        Self::one(GateKind::Sdg, q)
    }

    /// Panics if `control == target`; use [`Gate::new`] for checked construction.
    pub fn cx(control: QubitIndex, target: QubitIndex) -> Self {
        Self::new(GateKind::CX, &[control, target]).expect("distinct CX operands")
    }
    pub fn cz(a: QubitIndex, b: QubitIndex) -> Self {
        Self::new(GateKind::CZ, &[a, b]).expect("distinct CZ operands")
    }
    pub fn swap(a: QubitIndex, b: QubitIndex) -> Self {
        Self::new(GateKind::Swap, &[a, b]).expect("distinct SWAP operands")
    }

    pub fn kind(&self) -> GateKind {
        self.kind
    }

    pub fn targets(&self) -> &[QubitIndex] {
        &self.targets[..self.kind.arity()]
    }

    pub fn is_two_qubit(&self) -> bool {
        self.kind.arity() == 2
    }

    /// Same gate with every target passed through `map`.
    pub fn remapped(&self, map: impl Fn(QubitIndex) -> QubitIndex) -> Self {
        Gate {
            kind: self.kind,
            targets: [map(self.targets[0]), map(self.targets[1])],
        }
    }
}

impl fmt::Display for Gate {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.targets() {
            [q] => write!(f, "{:?}({q})", self.kind),
            [a, b] => write!(f, "{:?}({a},{b})", self.kind),
            _ => unreachable!(),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn arity_is_checked() {
        assert!(Gate::new(GateKind::H, &[0, 1]).is_err());
        assert!(Gate::new(GateKind::CZ, &[2]).is_err());
        assert!(matches!(
            Gate::new(GateKind::CX, &[3, 3]),
            Err(Error::DuplicateQubit(3))
        ));
        assert_eq!(Gate::cx(1, 2).targets(), &[1, 2]);
        assert_eq!(Gate::h(4).targets(), &[4]);
    }

    #[test]
    fn s_and_sdg_are_inverse() {
        let p = matmul2(&S, &SDG);
        for i in 0..2 {
            for j in 0..2 {
                assert!((p[i][j] - I2[i][j]).norm() < 1e-15);
            }
        }
    }
}
