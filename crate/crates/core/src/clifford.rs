//! The 24-element single-qubit Clifford group, modulo global phase.

use std::collections::VecDeque;
use std::fmt;
use std::sync::OnceLock;

use num_complex::Complex64;

use crate::gate::{self, matmul2, GateKind, Mat2};
use crate::pauli::Pauli;

const TOL: f64 = 1e-9;

struct Table {
    matrices: Vec<Mat2>,
    /// Shortest H/S word for each element, in application order.
    words: Vec<Vec<GateKind>>,
    product: Vec<[u8; 24]>,
}

fn canonical(m: &Mat2) -> Mat2 {
    let flat = [m[0][0], m[0][1], m[1][0], m[1][1]];
    let lead = flat.iter().find(|a| a.norm() > TOL).copied().unwrap_or(Complex64::new(1.0, 0.0));
    let phase = lead.conj() / lead.norm();
    [[m[0][0] * phase, m[0][1] * phase], [m[1][0] * phase, m[1][1] * phase]]
}

fn same(a: &Mat2, b: &Mat2) -> bool {
    (0..2).all(|i| (0..2).all(|j| (a[i][j] - b[i][j]).norm() < TOL))
}

fn find(matrices: &[Mat2], m: &Mat2) -> Option<usize> {
    let c = canonical(m);
    matrices.iter().position(|e| same(e, &c))
}

fn table() -> &'static Table {
    static TABLE: OnceLock<Table> = OnceLock::new();
    TABLE.get_or_init(|| {
        let mut matrices = vec![canonical(&gate::I2)];
        let mut words: Vec<Vec<GateKind>> = vec![vec![]];
        let mut queue = VecDeque::from([0usize]);
        while let Some(i) = queue.pop_front() {
            for (kind, g) in [(GateKind::H, gate::H), (GateKind::S, gate::S)] {
                let next = matmul2(&g, &matrices[i]);
                if find(&matrices, &next).is_none() {
                    matrices.push(canonical(&next));
                    let mut w = words[i].clone();
                    w.push(kind);
                    words.push(w);
                    queue.push_back(matrices.len() - 1);
                }
            }
        }
        assert_eq!(matrices.len(), 24, "single-qubit Clifford group has 24 elements");
        let product = (0..24)
            .map(|a| {
                let mut row = [0u8; 24];
                for (b, cell) in row.iter_mut().enumerate() {
                    let m = matmul2(&matrices[a], &matrices[b]);
                    *cell = find(&matrices, &m).expect("group closed") as u8;
                }
                row
            })
            .collect();
        Table {
            matrices,
            words,
            product,
        }
    })
}

/// Element of the single-qubit Clifford group.
#[derive(Clone, Copy, PartialEq, Eq, Hash)]
pub struct LocalClifford(u8);

impl LocalClifford {
    pub const IDENTITY: LocalClifford = LocalClifford(0);

    /// Looks up a unitary in the group; `None` if it is not Clifford.
    pub fn from_matrix(m: &Mat2) -> Option<Self> {
        find(&table().matrices, m).map(|i| LocalClifford(i as u8))
    }

    fn of(m: Mat2) -> Self {
        Self::from_matrix(&m).expect("generator is Clifford")
    }

    pub fn h() -> Self {
        Self::of(gate::H)
    }
    pub fn s() -> Self {
        Self::of(gate::S)
    }
    pub fn sdg() -> Self {
        Self::of(gate::SDG)
    }
    pub fn pauli(p: Pauli) -> Self {
        Self::of(p.matrix())
    }

    /// `(I + i s P) / sqrt(2)` for `s = ±1`, a square root of `± i P`.
    pub fn sqrt_pauli(p: Pauli, positive: bool) -> Self {
        let k = if positive { 1.0 } else { -1.0 };
        let pm = p.matrix();
        let r = std::f64::consts::FRAC_1_SQRT_2;
        let i = Complex64::new(0.0, k);
        let mut m = gate::I2;
        for a in 0..2 {
            for b in 0..2 {
                m[a][b] = (m[a][b] + i * pm[a][b]) * r;
            }
        }
        Self::of(m)
    }

    pub fn matrix(self) -> Mat2 {
        table().matrices[self.0 as usize]
    }

    /// `self · other`: `other` acts first.
    pub fn compose(self, other: LocalClifford) -> LocalClifford {
        LocalClifford(table().product[self.0 as usize][other.0 as usize])
    }

    pub fn inverse(self) -> LocalClifford {
        let row = &table().product[self.0 as usize];
        LocalClifford(row.iter().position(|&p| p == 0).expect("group element has an inverse") as u8)
    }

    pub fn is_identity(self) -> bool {
        self.0 == 0
    }

    pub fn is_pauli(self) -> bool {
        [Pauli::I, Pauli::X, Pauli::Y, Pauli::Z]
            .iter()
            .any(|&p| LocalClifford::pauli(p) == self)
    }

    /// `C† P C = sign · Q`; returns `(sign_is_negative, Q)`.
    pub fn conjugate(self, p: Pauli) -> (bool, Pauli) {
        if p == Pauli::I {
            return (false, Pauli::I);
        }
        let c = self.matrix();
        let m = matmul2(&gate::adjoint2(&c), &matmul2(&p.matrix(), &c));
        for q in [Pauli::X, Pauli::Y, Pauli::Z] {
            let qm = q.matrix();
            if same(&m, &qm) {
                return (false, q);
            }
            let neg = [[-qm[0][0], -qm[0][1]], [-qm[1][0], -qm[1][1]]];
            if same(&m, &neg) {
                return (true, q);
            }
        }
        unreachable!("Clifford conjugation maps Paulis to signed Paulis")
    }

    /// Shortest gate sequence over {H, S} realizing this element, in
    /// application order.
    pub fn gates(self) -> &'static [GateKind] {
        &table().words[self.0 as usize]
    }
}

impl Default for LocalClifford {
    fn default() -> Self {
        Self::IDENTITY
    }
}

impl fmt::Debug for LocalClifford {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_identity() {
            return write!(f, "I");
        }
        let word: Vec<String> = self.gates().iter().map(|g| format!("{g:?}")).collect();
        write!(f, "{}", word.join("·"))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn group_closure_and_inverses() {
        for i in 0..24u8 {
            let c = LocalClifford(i);
            assert!(c.compose(c.inverse()).is_identity());
            let mut m = gate::I2;
            for g in c.gates() {
                m = matmul2(&g.matrix().unwrap(), &m);
            }
            assert_eq!(LocalClifford::from_matrix(&m), Some(c));
        }
    }

    #[test]
    fn hadamard_swaps_x_and_z() {
        assert_eq!(LocalClifford::h().conjugate(Pauli::X), (false, Pauli::Z));
        assert_eq!(LocalClifford::h().conjugate(Pauli::Y), (true, Pauli::Y));
        assert_eq!(LocalClifford::s().conjugate(Pauli::X), (true, Pauli::Y));
    }

    #[test]
    fn sqrt_of_z_is_phase_gate() {
        // (I - iZ)/sqrt2 equals S up to phase.
        assert_eq!(LocalClifford::sqrt_pauli(Pauli::Z, false), LocalClifford::s());
        assert_eq!(LocalClifford::sqrt_pauli(Pauli::Z, true), LocalClifford::sdg());
        assert!(LocalClifford::pauli(Pauli::Y).is_pauli());
        assert!(!LocalClifford::h().is_pauli());
    }

    #[test]
    fn non_clifford_rejected() {
        let t = [
            [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
            [Complex64::new(0.0, 0.0), Complex64::from_polar(1.0, std::f64::consts::FRAC_PI_4)],
        ];
        assert!(LocalClifford::from_matrix(&t).is_none());
    }
}
