//! Reference computations shared by the integration tests. Everything here
//! is written directly from the definitions, without going through the
//! library's protocol, graph or analysis code.

#![allow(dead_code)]

use mqnc::gate;
use mqnc::{Complex64, DensityMatrix, Fill, Op, PureState};

pub fn c(re: f64) -> Complex64 {
    Complex64::new(re, 0.0)
}

/// `|G_2> = (|00> + |01> + |10> - |11>) / 2`.
pub fn g2() -> Vec<Complex64> {
    vec![c(0.5), c(0.5), c(0.5), c(-0.5)]
}

/// `|Φ+> = (|00> + |11>) / √2`.
pub fn phi_plus() -> Vec<Complex64> {
    let r = std::f64::consts::FRAC_1_SQRT_2;
    vec![c(r), c(0.0), c(0.0), c(r)]
}

/// Kronecker product with `b` on the higher-order qubits.
pub fn kron(a: &[Complex64], b: &[Complex64]) -> Vec<Complex64> {
    let mut out = Vec::with_capacity(a.len() * b.len());
    for y in b {
        for x in a {
            out.push(x * y);
        }
    }
    out
}

/// `<ψ|ρ|ψ>`.
pub fn fidelity_with(rho: &DensityMatrix, psi: &[Complex64]) -> f64 {
    let d = rho.dim();
    assert_eq!(d, psi.len());
    let mut acc = Complex64::new(0.0, 0.0);
    for r in 0..d {
        for col in 0..d {
            acc += psi[r].conj() * rho.get(r, col) * psi[col];
        }
    }
    acc.re
}

pub fn projector(psi: &[Complex64]) -> DensityMatrix {
    let d = psi.len();
    let n = d.trailing_zeros() as usize;
    let mut data = Vec::with_capacity(d * d);
    for r in 0..d {
        for col in 0..d {
            data.push(psi[r] * psi[col].conj());
        }
    }
    DensityMatrix::from_data(n, data).unwrap()
}

/// `F |ψ><ψ| + (1 - F)/3 (I - |ψ><ψ|)` on two qubits.
pub fn werner_oracle(fid: f64, psi: &[Complex64]) -> DensityMatrix {
    let p = projector(psi);
    let mut data = Vec::with_capacity(16);
    for r in 0..4 {
        for col in 0..4 {
            let id = if r == col { 1.0 } else { 0.0 };
            let pr = p.get(r, col);
            data.push(pr * fid + (c(id) - pr) * ((1.0 - fid) / 3.0));
        }
    }
    DensityMatrix::from_data(2, data).unwrap()
}

/// Graph state `∏ CZ_e |+>^n`, amplitude `(-1)^{#edges inside j} / √2^n`.
pub fn graph_amplitudes(n: usize, edges: &[(usize, usize)]) -> Vec<Complex64> {
    let norm = (1usize << n) as f64;
    (0..1usize << n)
        .map(|j| {
            let odd = edges.iter().filter(|&&(a, b)| j >> a & 1 == 1 && j >> b & 1 == 1).count() % 2;
            c(if odd == 1 { -1.0 } else { 1.0 } / norm.sqrt())
        })
        .collect()
}

/// Replays a circuit on a state vector from `|0…0>`, forcing the given
/// outcome on every measurement. Returns `None` for an impossible record.
pub fn replay_forced(circuit: &mqnc::Circuit, outcomes: &[u8]) -> Option<PureState> {
    let mut psi = PureState::new(circuit.num_qubits(), Fill::AllZero).unwrap();
    for op in circuit.ops() {
        match op {
            Op::Gate(g) => psi.apply(g).unwrap(),
            Op::Measure { qubit, basis, clbit } => {
                psi.measure_forced(*qubit, *basis, outcomes[*clbit]).ok()?;
            }
        }
    }
    Some(psi)
}

/// Pauli-mixture depolarizing channel on one qubit, term by term.
pub fn depolarize_oracle(rho: &DensityMatrix, q: usize, eps: f64) -> DensityMatrix {
    let keep = 1.0 - 3.0 * eps / 4.0;
    let terms: Vec<DensityMatrix> = [gate::X, gate::Y, gate::Z]
        .iter()
        .map(|p| {
            let mut r = rho.clone();
            r.apply_matrix(q, p).unwrap();
            r
        })
        .collect();
    let d = rho.dim();
    let mut data = Vec::with_capacity(d * d);
    for r in 0..d {
        for col in 0..d {
            let mixed: Complex64 = terms.iter().map(|t| t.get(r, col)).sum();
            data.push(rho.get(r, col) * keep + mixed * (eps / 4.0));
        }
    }
    DensityMatrix::from_data(rho.num_qubits(), data).unwrap()
}
