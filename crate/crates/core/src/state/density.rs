use num_complex::Complex64;

use super::kernel;
use super::{
    check_qubit, check_qubit_list, check_width, scatter_tables, Fill, MeasurementBasis,
    QubitIndex, MAX_DENSITY_QUBITS, MIN_BRANCH_PROBABILITY,
};
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind, Mat2};
use crate::linalg;
use crate::pauli::PauliString;
use crate::state::PureState;

/// n-qubit density matrix, row-major.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityMatrix {
    n: usize,
    data: Vec<Complex64>,
}

/// Tolerances used by [`DensityMatrix::validate`].
pub const HERMITIAN_TOL: f64 = 1e-10;
pub const TRACE_TOL: f64 = 1e-10;
pub const EIGEN_TOL: f64 = 1e-8;

impl DensityMatrix {
    pub fn new(n: usize, fill: Fill) -> Result<Self> {
        check_width(n, MAX_DENSITY_QUBITS)?;
        Self::from_pure(&PureState::new(n, fill)?)
    }

    pub fn from_pure(psi: &PureState) -> Result<Self> {
        let n = psi.num_qubits();
        check_width(n, MAX_DENSITY_QUBITS)?;
        let a = psi.amplitudes();
        let dim = a.len();
        let mut data = Vec::with_capacity(dim * dim);
        for r in 0..dim {
            for c in 0..dim {
                data.push(a[r] * a[c].conj());
            }
        }
        Ok(DensityMatrix { n, data })
    }

    /// Maximally mixed state `I / 2^n`.
    pub fn maximally_mixed(n: usize) -> Result<Self> {
        check_width(n, MAX_DENSITY_QUBITS)?;
        let dim = 1usize << n;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for i in 0..dim {
            data[i * dim + i] = Complex64::new(1.0 / dim as f64, 0.0);
        }
        Ok(DensityMatrix { n, data })
    }

    /// Builds a density matrix from row-major data and checks the invariants.
    pub fn from_data(n: usize, data: Vec<Complex64>) -> Result<Self> {
        check_width(n, MAX_DENSITY_QUBITS)?;
        if data.len() != 1usize << (2 * n) {
            return Err(Error::WidthMismatch {
                expected: 1 << (2 * n),
                actual: data.len(),
            });
        }
        let rho = DensityMatrix { n, data };
        rho.validate()?;
        Ok(rho)
    }

    pub(crate) fn from_raw(n: usize, data: Vec<Complex64>) -> Self {
        DensityMatrix { n, data }
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        1 << self.n
    }

    pub fn data(&self) -> &[Complex64] {
        &self.data
    }

    pub fn get(&self, row: usize, col: usize) -> Complex64 {
        self.data[row * self.dim() + col]
    }

    pub fn trace(&self) -> Complex64 {
        let dim = self.dim();
        (0..dim).map(|i| self.data[i * dim + i]).sum()
    }

    pub fn max_hermitian_defect(&self) -> f64 {
        let dim = self.dim();
        let mut worst: f64 = 0.0;
        for r in 0..dim {
            for c in r..dim {
                worst = worst.max((self.data[r * dim + c] - self.data[c * dim + r].conj()).norm());
            }
        }
        worst
    }

    pub fn eigenvalues(&self) -> Vec<f64> {
        linalg::hermitian_eigen(&self.data, self.dim()).0
    }

    /// Checks Hermiticity, unit trace and eigenvalues >= -1e-8.
    pub fn validate(&self) -> Result<()> {
        let defect = self.max_hermitian_defect();
        if defect > HERMITIAN_TOL {
            return Err(Error::Analysis(format!("matrix not Hermitian (defect {defect:e})")));
        }
        let tr = self.trace();
        if (tr - Complex64::new(1.0, 0.0)).norm() > TRACE_TOL {
            return Err(Error::Analysis(format!("trace {tr} differs from 1")));
        }
        let min = self.eigenvalues().into_iter().fold(f64::INFINITY, f64::min);
        if min < -EIGEN_TOL {
            return Err(Error::NotPositive(min));
        }
        Ok(())
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        for &q in gate.targets() {
            check_qubit(q, self.n)?;
        }
        let n = self.n;
        let t = gate.targets();
        match gate.kind() {
            GateKind::CX => {
                kernel::apply_cx(&mut self.data, t[0] + n, t[1] + n);
                kernel::apply_cx(&mut self.data, t[0], t[1]);
            }
            GateKind::CZ => {
                kernel::apply_cz(&mut self.data, t[0] + n, t[1] + n);
                kernel::apply_cz(&mut self.data, t[0], t[1]);
            }
            GateKind::Swap => {
                kernel::apply_swap(&mut self.data, t[0] + n, t[1] + n);
                kernel::apply_swap(&mut self.data, t[0], t[1]);
            }
            kind => {
                let m = kind.matrix().expect("single-qubit kind");
                self.conjugate_1q(t[0], &m);
            }
        }
        Ok(())
    }

    /// `rho -> U rho U†` for a single-qubit `U` on `q`.
    pub fn apply_matrix(&mut self, q: QubitIndex, m: &Mat2) -> Result<()> {
        check_qubit(q, self.n)?;
        self.conjugate_1q(q, m);
        Ok(())
    }

    fn conjugate_1q(&mut self, q: QubitIndex, m: &Mat2) {
        kernel::apply_1q(&mut self.data, q + self.n, m);
        kernel::apply_1q(&mut self.data, q, &kernel::conj2(m));
    }

    /// Left multiplication only, `rho -> M rho`; used for expectation values.
    fn left_multiply_1q(&mut self, q: QubitIndex, m: &Mat2) {
        kernel::apply_1q(&mut self.data, q + self.n, m);
    }

    /// Applies `rho -> (1 - 3e/4) rho + (e/4)(X rho X + Y rho Y + Z rho Z)` on qubit `q`.
    ///
    /// In the basis of qubit `q` this keeps diagonal blocks mixing at rate e/2
    /// and shrinks coherences by `1 - e`.
    pub(crate) fn depolarize_in_place(&mut self, q: QubitIndex, epsilon: f64) {
        let dim = self.dim();
        let mask = 1usize << q;
        for r in 0..dim {
            if r & mask != 0 {
                continue;
            }
            let r1 = r | mask;
            for c in 0..dim {
                if c & mask != 0 {
                    continue;
                }
                let c1 = c | mask;
                let d00 = self.data[r * dim + c];
                let d11 = self.data[r1 * dim + c1];
                self.data[r * dim + c] = (1.0 - epsilon / 2.0) * d00 + (epsilon / 2.0) * d11;
                self.data[r1 * dim + c1] = (1.0 - epsilon / 2.0) * d11 + (epsilon / 2.0) * d00;
                self.data[r * dim + c1] *= 1.0 - epsilon;
                self.data[r1 * dim + c] *= 1.0 - epsilon;
            }
        }
    }

    pub(crate) fn apply_pauli_code(&mut self, q: QubitIndex, code: u8) {
        kernel::apply_pauli(&mut self.data, q + self.n, code);
        kernel::apply_pauli(&mut self.data, q, code);
        // conj(Y) = -Y
        if code == 2 {
            for a in &mut self.data {
                *a = -*a;
            }
        }
    }

    /// Unnormalized projection onto `outcome` of a `basis` measurement of `q`.
    ///
    /// The basis change is applied first, leaving the measured qubit in
    /// `|outcome><outcome|`. Returns the branch weight.
    pub(crate) fn project(&mut self, q: QubitIndex, basis: MeasurementBasis, outcome: u8) -> f64 {
        if let Some(r) = basis.rotation() {
            self.conjugate_1q(q, &r);
        }
        let dim = self.dim();
        let mask = 1usize << q;
        let keep = if outcome == 1 { mask } else { 0 };
        for r in 0..dim {
            for c in 0..dim {
                if r & mask != keep || c & mask != keep {
                    self.data[r * dim + c] = Complex64::new(0.0, 0.0);
                }
            }
        }
        self.trace().re
    }

    pub(crate) fn scale(&mut self, k: f64) {
        for a in &mut self.data {
            *a *= k;
        }
    }

    pub(crate) fn add_scaled(&mut self, other: &DensityMatrix, k: f64) {
        for (a, b) in self.data.iter_mut().zip(&other.data) {
            *a += b * k;
        }
    }

    pub fn outcome_probabilities(&self, q: QubitIndex, basis: MeasurementBasis) -> Result<[f64; 2]> {
        check_qubit(q, self.n)?;
        let mut zero = self.clone();
        let p0 = zero.project(q, basis, 0);
        let total = self.trace().re;
        Ok([p0 / total, (total - p0) / total])
    }

    /// Projects onto a chosen outcome and renormalizes; errors if its
    /// probability is below 1e-12. Returns the branch probability.
    pub fn measure_forced(&mut self, q: QubitIndex, basis: MeasurementBasis, outcome: u8) -> Result<f64> {
        check_qubit(q, self.n)?;
        let mut branch = self.clone();
        let p = branch.project(q, basis, outcome) / self.trace().re;
        if p < MIN_BRANCH_PROBABILITY {
            return Err(Error::ZeroProbabilityBranch { probability: p });
        }
        branch.scale(1.0 / branch.trace().re);
        *self = branch;
        Ok(p)
    }

    /// Samples a measurement outcome and collapses the state.
    pub fn measure<R: rand::Rng + ?Sized>(
        &mut self,
        q: QubitIndex,
        basis: MeasurementBasis,
        rng: &mut R,
    ) -> Result<super::Measurement> {
        let p = self.outcome_probabilities(q, basis)?;
        let outcome = u8::from(rng.random::<f64>() < p[1]);
        let probability = self.measure_forced(q, basis, outcome)?;
        Ok(super::Measurement {
            outcome,
            probability,
        })
    }

    /// Reduced state over `keep`, in the given order (first entry becomes qubit 0).
    pub fn partial_trace(&self, keep: &[QubitIndex]) -> Result<DensityMatrix> {
        check_qubit_list(keep, self.n)?;
        let (kept, traced) = scatter_tables(keep, self.n);
        let full = self.dim();
        let dim = kept.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (a, &ka) in kept.iter().enumerate() {
            for (b, &kb) in kept.iter().enumerate() {
                data[a * dim + b] = traced
                    .iter()
                    .map(|&t| self.data[(ka | t) * full + (kb | t)])
                    .sum();
            }
        }
        Ok(DensityMatrix { n: keep.len(), data })
    }

    /// `self ⊗ other` with `self` on the low qubits.
    pub fn tensor(&self, other: &DensityMatrix) -> Result<DensityMatrix> {
        let n = self.n + other.n;
        check_width(n, MAX_DENSITY_QUBITS)?;
        let (da, db) = (self.dim(), other.dim());
        let dim = da * db;
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for r in 0..dim {
            for c in 0..dim {
                data[r * dim + c] = self.get(r % da, c % da) * other.get(r / da, c / da);
            }
        }
        Ok(DensityMatrix { n, data })
    }

    /// `Tr(P rho)` for a Pauli string (phase included, real part returned).
    pub fn expectation(&self, obs: &PauliString) -> Result<f64> {
        self.check_width(obs.len())?;
        let dim = self.dim();
        let (xmask, _) = obs.masks();
        let v: Complex64 = (0..dim)
            .map(|j| obs.column_phase(j) * self.data[j * dim + (j ^ xmask)])
            .sum();
        Ok(v.re)
    }

    /// `Tr(O rho)` for a dense row-major observable.
    pub fn expectation_dense(&self, op: &[Complex64]) -> Result<f64> {
        let dim = self.dim();
        if op.len() != dim * dim {
            return Err(Error::WidthMismatch {
                expected: self.n,
                actual: op.len().trailing_zeros() as usize / 2,
            });
        }
        let mut acc = Complex64::new(0.0, 0.0);
        for r in 0..dim {
            for k in 0..dim {
                acc += op[r * dim + k] * self.data[k * dim + r];
            }
        }
        Ok(acc.re)
    }

    /// `Tr((⊗_q O_q) rho)` for single-qubit factors on distinct qubits.
    pub fn expectation_local(&self, factors: &[(QubitIndex, Mat2)]) -> Result<f64> {
        let qubits: Vec<_> = factors.iter().map(|f| f.0).collect();
        check_qubit_list(&qubits, self.n)?;
        let mut m = self.clone();
        for (q, op) in factors {
            m.left_multiply_1q(*q, op);
        }
        Ok(m.trace().re)
    }

    pub(crate) fn check_width(&self, n: usize) -> Result<()> {
        if n != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                actual: n,
            });
        }
        Ok(())
    }

    /// `(1/2) Σ |λ_i(self - other)|`.
    pub fn trace_distance(&self, other: &DensityMatrix) -> Result<f64> {
        self.check_width(other.n)?;
        let diff: Vec<Complex64> = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
        let (ev, _) = linalg::hermitian_eigen(&diff, self.dim());
        Ok(0.5 * ev.iter().map(|e| e.abs()).sum::<f64>())
    }

    /// Convex combination `p * self + (1 - p) * other`.
    pub fn mix(&self, other: &DensityMatrix, p: f64) -> Result<DensityMatrix> {
        self.check_width(other.n)?;
        let data = self
            .data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| a * p + b * (1.0 - p))
            .collect();
        Ok(DensityMatrix { n: self.n, data })
    }

    pub fn max_abs_diff(&self, other: &DensityMatrix) -> f64 {
        self.data
            .iter()
            .zip(&other.data)
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::pauli::PauliString;

    fn phi_plus() -> DensityMatrix {
        let mut s = PureState::new(2, Fill::AllZero).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::cx(0, 1)).unwrap();
        DensityMatrix::from_pure(&s).unwrap()
    }

    #[test]
    fn partial_trace_of_bell_pair_is_mixed() {
        let rho = phi_plus().partial_trace(&[0]).unwrap();
        let mixed = DensityMatrix::maximally_mixed(1).unwrap();
        assert!(rho.max_abs_diff(&mixed) < 1e-12);
    }

    #[test]
    fn partial_trace_keep_all_is_identity() {
        let rho = phi_plus();
        assert!(rho.partial_trace(&[0, 1]).unwrap().max_abs_diff(&rho) < 1e-15);
    }

    #[test]
    fn partial_trace_rejects_bad_lists() {
        let rho = phi_plus();
        assert!(matches!(rho.partial_trace(&[]), Err(Error::EmptyQubitList)));
        assert!(matches!(rho.partial_trace(&[1, 1]), Err(Error::DuplicateQubit(1))));
        assert!(rho.partial_trace(&[2]).is_err());
    }

    #[test]
    fn partial_trace_respects_order() {
        // |0>_0 |1>_1: keeping [1, 0] puts the |1> on the new qubit 0.
        let s = PureState::basis(2, 0b10).unwrap();
        let rho = DensityMatrix::from_pure(&s).unwrap().partial_trace(&[1, 0]).unwrap();
        assert!((rho.get(1, 1).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn pauli_expectations_on_phi_plus() {
        let rho = phi_plus();
        let zz: PauliString = "ZZ".parse().unwrap();
        let xz: PauliString = "XZ".parse().unwrap();
        let yy: PauliString = "YY".parse().unwrap();
        assert!((rho.expectation(&zz).unwrap() - 1.0).abs() < 1e-12);
        assert!(rho.expectation(&xz).unwrap().abs() < 1e-12);
        assert!((rho.expectation(&yy).unwrap() + 1.0).abs() < 1e-12);
        assert!(rho.expectation(&"Z".parse().unwrap()).is_err());
    }

    #[test]
    fn pauli_code_conjugation_matches_matrix() {
        let mut s = PureState::new(2, Fill::AllZero).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::s(0)).unwrap();
        s.apply(&Gate::cx(0, 1)).unwrap();
        let rho = DensityMatrix::from_pure(&s).unwrap();
        for code in 1..4u8 {
            let mut a = rho.clone();
            a.apply_pauli_code(1, code);
            let mut b = s.clone();
            b.apply_pauli_code(1, code);
            let b = DensityMatrix::from_pure(&b).unwrap();
            assert!(a.max_abs_diff(&b) < 1e-12, "pauli {code}");
        }
    }

    #[test]
    fn validate_catches_non_hermitian() {
        let mut data = phi_plus().data().to_vec();
        data[1] = Complex64::new(0.3, 0.0);
        assert!(DensityMatrix::from_data(2, data).is_err());
    }

    #[test]
    fn forced_measurement_probabilities() {
        let mut rho = phi_plus();
        let p = rho.measure_forced(0, MeasurementBasis::Z, 1).unwrap();
        assert!((p - 0.5).abs() < 1e-12);
        assert!((rho.get(3, 3).re - 1.0).abs() < 1e-12);
        assert!(rho.measure_forced(1, MeasurementBasis::Z, 0).is_err());
    }
}
