//! Pauli operators and Pauli strings.

use std::fmt;
use std::str::FromStr;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::{self, Mat2};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Pauli {
    I,
    X,
    Y,
    Z,
}

impl Pauli {
    pub fn matrix(self) -> Mat2 {
        match self {
            Pauli::I => gate::I2,
            Pauli::X => gate::X,
            Pauli::Y => gate::Y,
            Pauli::Z => gate::Z,
        }
    }

    /// (x, z) bits of the symplectic representation.
    pub fn bits(self) -> (bool, bool) {
        match self {
            Pauli::I => (false, false),
            Pauli::X => (true, false),
            Pauli::Y => (true, true),
            Pauli::Z => (false, true),
        }
    }

    pub fn from_bits(x: bool, z: bool) -> Self {
        match (x, z) {
            (false, false) => Pauli::I,
            (true, false) => Pauli::X,
            (true, true) => Pauli::Y,
            (false, true) => Pauli::Z,
        }
    }

    /// Product `self * other` as (phase exponent of i, result).
    fn mul(self, other: Pauli) -> (u8, Pauli) {
        use Pauli::*;
        match (self, other) {
            (I, p) | (p, I) => (0, p),
            (a, b) if a == b => (0, I),
            (X, Y) => (1, Z),
            (Y, X) => (3, Z),
            (Y, Z) => (1, X),
            (Z, Y) => (3, X),
            (Z, X) => (1, Y),
            (X, Z) => (3, Y),
            _ => unreachable!(),
        }
    }

    fn letter(self) -> char {
        match self {
            Pauli::I => 'I',
            Pauli::X => 'X',
            Pauli::Y => 'Y',
            Pauli::Z => 'Z',
        }
    }
}

/// Global phase of a Pauli string, a power of i.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Phase {
    PlusOne,
    PlusI,
    MinusOne,
    MinusI,
}

impl Phase {
    pub fn from_exponent(k: u8) -> Self {
        match k % 4 {
            0 => Phase::PlusOne,
            1 => Phase::PlusI,
            2 => Phase::MinusOne,
            _ => Phase::MinusI,
        }
    }

    pub fn exponent(self) -> u8 {
        match self {
            Phase::PlusOne => 0,
            Phase::PlusI => 1,
            Phase::MinusOne => 2,
            Phase::MinusI => 3,
        }
    }

    pub fn value(self) -> Complex64 {
        match self {
            Phase::PlusOne => Complex64::new(1.0, 0.0),
            Phase::PlusI => Complex64::new(0.0, 1.0),
            Phase::MinusOne => Complex64::new(-1.0, 0.0),
            Phase::MinusI => Complex64::new(0.0, -1.0),
        }
    }
}

/// Tensor product of single-qubit Paulis; `letters[q]` acts on qubit `q`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliString {
    pub letters: Vec<Pauli>,
    pub phase: Phase,
}

impl PauliString {
    pub fn identity(n: usize) -> Self {
        PauliString {
            letters: vec![Pauli::I; n],
            phase: Phase::PlusOne,
        }
    }

    pub fn new(letters: Vec<Pauli>) -> Self {
        PauliString {
            letters,
            phase: Phase::PlusOne,
        }
    }

    /// Width-`n` string with the given letters at the given qubits.
    pub fn sparse(n: usize, factors: &[(usize, Pauli)]) -> Self {
        let mut s = Self::identity(n);
        for &(q, p) in factors {
            s.letters[q] = p;
        }
        s
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    pub fn weight(&self) -> usize {
        self.letters.iter().filter(|&&p| p != Pauli::I).count()
    }

    /// Bit masks of qubits carrying an X or Z component.
    pub fn masks(&self) -> (usize, usize) {
        self.letters
            .iter()
            .enumerate()
            .fold((0, 0), |(xm, zm), (q, p)| {
                let (x, z) = p.bits();
                (xm | (usize::from(x) << q), zm | (usize::from(z) << q))
            })
    }

    /// Coefficient `c` with `P|j> = c |j ^ xmask>`.
    pub fn column_phase(&self, j: usize) -> Complex64 {
        let mut k = self.phase.exponent() as u32;
        for (q, p) in self.letters.iter().enumerate() {
            let bit = (j >> q & 1) as u32;
            match p {
                Pauli::I | Pauli::X => {}
                Pauli::Z => k += 2 * bit,
                Pauli::Y => k += 1 + 2 * bit,
            }
        }
        Phase::from_exponent((k % 4) as u8).value()
    }

    pub fn commutes_with(&self, other: &PauliString) -> bool {
        let anti = self
            .letters
            .iter()
            .zip(&other.letters)
            .filter(|(a, b)| **a != Pauli::I && **b != Pauli::I && a != b)
            .count();
        anti % 2 == 0
    }

    pub fn multiply(&self, other: &PauliString) -> Result<PauliString> {
        if self.len() != other.len() {
            return Err(Error::WidthMismatch {
                expected: self.len(),
                actual: other.len(),
            });
        }
        let mut k = self.phase.exponent() + other.phase.exponent();
        let letters = self
            .letters
            .iter()
            .zip(&other.letters)
            .map(|(&a, &b)| {
                let (e, p) = a.mul(b);
                k += e;
                p
            })
            .collect();
        Ok(PauliString {
            letters,
            phase: Phase::from_exponent(k),
        })
    }

    /// Dense row-major matrix; intended for small widths.
    pub fn to_matrix(&self) -> Vec<Complex64> {
        let dim = 1usize << self.len();
        let (xmask, _) = self.masks();
        let mut m = vec![Complex64::new(0.0, 0.0); dim * dim];
        for j in 0..dim {
            m[(j ^ xmask) * dim + j] = self.column_phase(j);
        }
        m
    }
}

impl fmt::Display for PauliString {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sign = match self.phase {
            Phase::PlusOne => "+",
            Phase::MinusOne => "-",
            Phase::PlusI => "+i",
            Phase::MinusI => "-i",
        };
        write!(f, "{sign}")?;
        for p in &self.letters {
            write!(f, "{}", p.letter())?;
        }
        Ok(())
    }
}

impl FromStr for PauliString {
    type Err = Error;

    /// Parses strings such as `"XZI"`, `"-YY"` or `"+iXZ"`; character `k` of
    /// the letter part acts on qubit `k`.
    fn from_str(s: &str) -> Result<Self> {
        let (phase, rest) = if let Some(r) = s.strip_prefix("+i") {
            (Phase::PlusI, r)
        } else if let Some(r) = s.strip_prefix("-i") {
            (Phase::MinusI, r)
        } else if let Some(r) = s.strip_prefix('i') {
            (Phase::PlusI, r)
        } else if let Some(r) = s.strip_prefix('-') {
            (Phase::MinusOne, r)
        } else {
            (Phase::PlusOne, s.strip_prefix('+').unwrap_or(s))
        };
        let letters = rest
            .chars()
            .map(|c| match c {
                'I' => Ok(Pauli::I),
                'X' => Ok(Pauli::X),
                'Y' => Ok(Pauli::Y),
                'Z' => Ok(Pauli::Z),
                other => Err(Error::InvalidObservable(format!("unknown Pauli letter {other:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if letters.is_empty() {
            return Err(Error::InvalidObservable("empty Pauli string".into()));
        }
        Ok(PauliString { letters, phase })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_display() {
        let p: PauliString = "-iXYZ".parse().unwrap();
        assert_eq!(p.phase, Phase::MinusI);
        assert_eq!(p.letters, vec![Pauli::X, Pauli::Y, Pauli::Z]);
        assert_eq!(p.to_string(), "-iXYZ");
        assert!("XQ".parse::<PauliString>().is_err());
    }

    #[test]
    fn products_and_commutation() {
        let x: PauliString = "XI".parse().unwrap();
        let z: PauliString = "ZI".parse().unwrap();
        let xz = x.multiply(&z).unwrap();
        assert_eq!(xz.to_string(), "-iYI");
        assert!(!x.commutes_with(&z));
        let xx: PauliString = "XX".parse().unwrap();
        let zz: PauliString = "ZZ".parse().unwrap();
        assert!(xx.commutes_with(&zz));
    }

    #[test]
    fn matrix_of_y_on_qubit_one() {
        let m: PauliString = "IY".parse().unwrap();
        let dense = m.to_matrix();
        // Y|0>_1 = i|1>_1 : column 0 -> row 2
        assert_eq!(dense[2 * 4], Complex64::new(0.0, 1.0));
        assert_eq!(dense[2], Complex64::new(0.0, -1.0));
    }
}
