use num_complex::Complex64;
use rand::Rng;

use super::kernel;
use super::{
    check_qubit, check_qubit_list, check_width, scatter_tables, Fill, Measurement,
    MeasurementBasis, QubitIndex, MAX_PURE_QUBITS, MIN_BRANCH_PROBABILITY,
};
use crate::error::{Error, Result};
use crate::gate::{Gate, GateKind, Mat2};
use crate::pauli::PauliString;
use crate::state::DensityMatrix;

/// Normalized n-qubit state vector.
#[derive(Clone, Debug, PartialEq)]
pub struct PureState {
    n: usize,
    amps: Vec<Complex64>,
}

impl PureState {
    pub fn new(n: usize, fill: Fill) -> Result<Self> {
        Self::with_limit(n, fill, MAX_PURE_QUBITS)
    }

    pub fn with_limit(n: usize, fill: Fill, limit: usize) -> Result<Self> {
        check_width(n, limit)?;
        let dim = 1usize << n;
        let amps = match fill {
            Fill::AllZero => {
                let mut v = vec![Complex64::new(0.0, 0.0); dim];
                v[0] = Complex64::new(1.0, 0.0);
                v
            }
            Fill::AllPlus => vec![Complex64::new((dim as f64).sqrt().recip(), 0.0); dim],
        };
        Ok(PureState { n, amps })
    }

    /// Wraps raw amplitudes; the vector is normalized if its norm is positive.
    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let dim = amps.len();
        if dim < 2 || !dim.is_power_of_two() {
            return Err(Error::Analysis(format!(
                "amplitude vector length {dim} is not a power of two >= 2"
            )));
        }
        let n = dim.trailing_zeros() as usize;
        check_width(n, MAX_PURE_QUBITS)?;
        let mut state = PureState { n, amps };
        let norm = state.norm_sqr();
        if norm <= 0.0 {
            return Err(Error::Analysis("zero amplitude vector".into()));
        }
        state.scale(norm.sqrt().recip());
        Ok(state)
    }

    /// Computational basis state with the given bits (bit q of `index` is qubit q).
    pub fn basis(n: usize, index: usize) -> Result<Self> {
        let mut s = Self::new(n, Fill::AllZero)?;
        if index >= s.amps.len() {
            return Err(Error::QubitOutOfRange { qubit: index, width: n });
        }
        s.amps[0] = Complex64::new(0.0, 0.0);
        s.amps[index] = Complex64::new(1.0, 0.0);
        Ok(s)
    }

    pub fn num_qubits(&self) -> usize {
        self.n
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    fn scale(&mut self, k: f64) {
        for a in &mut self.amps {
            *a *= k;
        }
    }

    pub fn apply(&mut self, gate: &Gate) -> Result<()> {
        for &q in gate.targets() {
            check_qubit(q, self.n)?;
        }
        let t = gate.targets();
        match gate.kind() {
            GateKind::CX => kernel::apply_cx(&mut self.amps, t[0], t[1]),
            GateKind::CZ => kernel::apply_cz(&mut self.amps, t[0], t[1]),
            GateKind::Swap => kernel::apply_swap(&mut self.amps, t[0], t[1]),
            kind => {
                let m = kind.matrix().expect("single-qubit kind");
                kernel::apply_1q(&mut self.amps, t[0], &m);
            }
        }
        Ok(())
    }

    /// Applies an arbitrary 2x2 unitary to qubit `q`.
    pub fn apply_matrix(&mut self, q: QubitIndex, m: &Mat2) -> Result<()> {
        check_qubit(q, self.n)?;
        kernel::apply_1q(&mut self.amps, q, m);
        Ok(())
    }

    /// Applies a Pauli code (0 = I, 1 = X, 2 = Y, 3 = Z).
    pub(crate) fn apply_pauli_code(&mut self, q: QubitIndex, code: u8) {
        kernel::apply_pauli(&mut self.amps, q, code);
    }

    fn rotate_to_z(&mut self, q: QubitIndex, basis: MeasurementBasis) {
        if let Some(r) = basis.rotation() {
            kernel::apply_1q(&mut self.amps, q, &r);
        }
    }

    fn prob_one(&self, q: QubitIndex) -> f64 {
        let mask = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    fn collapse(&mut self, q: QubitIndex, outcome: u8, probability: f64) {
        let mask = 1usize << q;
        let keep = if outcome == 1 { mask } else { 0 };
        let k = probability.sqrt().recip();
        for (i, a) in self.amps.iter_mut().enumerate() {
            if i & mask == keep {
                *a *= k;
            } else {
                *a = Complex64::new(0.0, 0.0);
            }
        }
    }

    /// Born probabilities of outcomes 0 and 1 for a measurement of `q` in `basis`.
    pub fn outcome_probabilities(&self, q: QubitIndex, basis: MeasurementBasis) -> Result<[f64; 2]> {
        check_qubit(q, self.n)?;
        let mut rotated = self.clone();
        rotated.rotate_to_z(q, basis);
        let p1 = rotated.prob_one(q);
        Ok([1.0 - p1, p1])
    }

    /// Samples a measurement of `q` in `basis`.
    ///
    /// The basis change is applied before a computational-basis readout, so the
    /// measured qubit is left in `|outcome>`.
    pub fn measure<R: Rng + ?Sized>(
        &mut self,
        q: QubitIndex,
        basis: MeasurementBasis,
        rng: &mut R,
    ) -> Result<Measurement> {
        check_qubit(q, self.n)?;
        self.rotate_to_z(q, basis);
        let p1 = self.prob_one(q).clamp(0.0, 1.0);
        let outcome = u8::from(rng.random::<f64>() < p1);
        let probability = if outcome == 1 { p1 } else { 1.0 - p1 };
        self.collapse(q, outcome, probability);
        Ok(Measurement {
            outcome,
            probability,
        })
    }

    /// Projects onto a chosen outcome; errors if its probability is below 1e-12.
    pub fn measure_forced(
        &mut self,
        q: QubitIndex,
        basis: MeasurementBasis,
        outcome: u8,
    ) -> Result<f64> {
        check_qubit(q, self.n)?;
        let mut rotated = self.clone();
        rotated.rotate_to_z(q, basis);
        let p1 = rotated.prob_one(q).clamp(0.0, 1.0);
        let probability = if outcome == 1 { p1 } else { 1.0 - p1 };
        if probability < MIN_BRANCH_PROBABILITY {
            return Err(Error::ZeroProbabilityBranch { probability });
        }
        rotated.collapse(q, outcome, probability);
        *self = rotated;
        Ok(probability)
    }

    /// Removes a qubit that is in the computational basis state `|bit>`,
    /// renumbering the qubits above it down by one.
    pub fn discard_qubit(&self, q: QubitIndex, bit: u8) -> Result<PureState> {
        check_qubit(q, self.n)?;
        if self.n == 1 {
            return Err(Error::InvalidWidth { width: 0, limit: MAX_PURE_QUBITS });
        }
        let low = (1usize << q) - 1;
        let amps: Vec<Complex64> = (0..self.amps.len() >> 1)
            .map(|j| {
                let i = (j & low) | ((j & !low) << 1) | ((bit as usize) << q);
                self.amps[i]
            })
            .collect();
        let mut out = PureState { n: self.n - 1, amps };
        let norm = out.norm_sqr();
        if norm < MIN_BRANCH_PROBABILITY {
            return Err(Error::ZeroProbabilityBranch { probability: norm });
        }
        out.scale(norm.sqrt().recip());
        Ok(out)
    }

    /// `|<self|other>|^2`, insensitive to global phase.
    pub fn overlap(&self, other: &PureState) -> Result<f64> {
        if self.n != other.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                actual: other.n,
            });
        }
        let inner: Complex64 = self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum();
        Ok(inner.norm_sqr())
    }

    /// `self ⊗ other` with `self` on the low qubits.
    pub fn tensor(&self, other: &PureState) -> Result<PureState> {
        check_width(self.n + other.n, MAX_PURE_QUBITS)?;
        let lo = self.amps.len();
        let amps = (0..lo * other.amps.len())
            .map(|i| self.amps[i % lo] * other.amps[i / lo])
            .collect();
        Ok(PureState {
            n: self.n + other.n,
            amps,
        })
    }

    /// Reduced density matrix over `keep`, in the given order.
    pub fn reduced(&self, keep: &[QubitIndex]) -> Result<DensityMatrix> {
        check_qubit_list(keep, self.n)?;
        let (kept, traced) = scatter_tables(keep, self.n);
        let dim = kept.len();
        let mut data = vec![Complex64::new(0.0, 0.0); dim * dim];
        for (a, &ka) in kept.iter().enumerate() {
            for (b, &kb) in kept.iter().enumerate().skip(a) {
                let s: Complex64 = traced
                    .iter()
                    .map(|&t| self.amps[ka | t] * self.amps[kb | t].conj())
                    .sum();
                data[a * dim + b] = s;
                data[b * dim + a] = s.conj();
            }
        }
        Ok(DensityMatrix::from_raw(keep.len(), data))
    }

    pub fn to_density(&self) -> Result<DensityMatrix> {
        DensityMatrix::from_pure(self)
    }

    pub fn expectation(&self, obs: &PauliString) -> Result<f64> {
        if obs.len() != self.n {
            return Err(Error::WidthMismatch {
                expected: self.n,
                actual: obs.len(),
            });
        }
        let (xmask, _) = obs.masks();
        let v: Complex64 = (0..self.amps.len())
            .map(|j| self.amps[j ^ xmask].conj() * obs.column_phase(j) * self.amps[j])
            .sum();
        Ok(v.re)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn approx(a: Complex64, re: f64, im: f64) -> bool {
        (a - Complex64::new(re, im)).norm() < 1e-12
    }

    #[test]
    fn init_fills() {
        let z = PureState::new(1, Fill::AllZero).unwrap();
        assert!(approx(z.amplitudes()[0], 1.0, 0.0) && approx(z.amplitudes()[1], 0.0, 0.0));
        let p = PureState::new(2, Fill::AllPlus).unwrap();
        assert!(p.amplitudes().iter().all(|&a| approx(a, 0.5, 0.0)));
    }

    #[test]
    fn init_rejects_bad_width() {
        assert!(matches!(PureState::new(0, Fill::AllZero), Err(Error::InvalidWidth { .. })));
        assert!(PureState::new(21, Fill::AllZero).is_err());
        assert!(PureState::with_limit(5, Fill::AllZero, 4).is_err());
    }

    #[test]
    fn swap_moves_excitation() {
        // |01>: qubit 0 is 1.
        let mut s = PureState::basis(2, 0b01).unwrap();
        s.apply(&Gate::swap(0, 1)).unwrap();
        assert!(approx(s.amplitudes()[0b10], 1.0, 0.0));
    }

    #[test]
    fn cz_on_plus_plus_gives_g2() {
        let mut s = PureState::new(2, Fill::AllPlus).unwrap();
        s.apply(&Gate::cz(0, 1)).unwrap();
        let expect = [0.5, 0.5, 0.5, -0.5];
        for (a, e) in s.amplitudes().iter().zip(expect) {
            assert!(approx(*a, e, 0.0));
        }
    }

    #[test]
    fn out_of_range_gate() {
        let mut s = PureState::new(2, Fill::AllZero).unwrap();
        assert!(matches!(
            s.apply(&Gate::h(2)),
            Err(Error::QubitOutOfRange { qubit: 2, width: 2 })
        ));
    }

    #[test]
    fn x_measurement_of_plus_is_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..10 {
            let mut s = PureState::new(1, Fill::AllPlus).unwrap();
            let m = s.measure(0, MeasurementBasis::X, &mut rng).unwrap();
            assert_eq!(m.outcome, 0);
            assert!((m.probability - 1.0).abs() < 1e-12);
        }
        let mut s = PureState::new(1, Fill::AllPlus).unwrap();
        assert!(matches!(
            s.measure_forced(0, MeasurementBasis::X, 1),
            Err(Error::ZeroProbabilityBranch { .. })
        ));
    }

    #[test]
    fn x_measurement_of_zero_is_unbiased() {
        let s = PureState::new(1, Fill::AllZero).unwrap();
        let p = s.outcome_probabilities(0, MeasurementBasis::X).unwrap();
        assert!((p[0] - 0.5).abs() < 1e-12 && (p[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn y_measurement_of_plus_i() {
        let mut s = PureState::new(1, Fill::AllZero).unwrap();
        s.apply(&Gate::h(0)).unwrap();
        s.apply(&Gate::s(0)).unwrap();
        let p = s.outcome_probabilities(0, MeasurementBasis::Y).unwrap();
        assert!((p[0] - 1.0).abs() < 1e-12);
    }

    #[test]
    fn discard_qubit_renumbers() {
        // qubit 1 in |1>, qubits 0 and 2 in |0>,|1>
        let s = PureState::basis(3, 0b110).unwrap();
        let r = s.discard_qubit(1, 1).unwrap();
        assert_eq!(r.num_qubits(), 2);
        assert!(approx(r.amplitudes()[0b10], 1.0, 0.0));
        assert!(s.discard_qubit(1, 0).is_err());
    }

    #[test]
    fn tensor_places_first_factor_low() {
        let one = PureState::basis(1, 1).unwrap();
        let zero = PureState::basis(1, 0).unwrap();
        let t = one.tensor(&zero).unwrap();
        assert!(approx(t.amplitudes()[0b01], 1.0, 0.0));
    }
}
