//! Ordered gate/measurement programs.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gate::Gate;
use crate::state::{check_qubit, MeasurementBasis, QubitIndex};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Op {
    Gate(Gate),
    /// Single-qubit Pauli measurement; the outcome is written to classical bit `clbit`.
    Measure {
        qubit: QubitIndex,
        basis: MeasurementBasis,
        clbit: usize,
    },
}

impl Op {
    pub fn qubits(&self) -> &[QubitIndex] {
        match self {
            Op::Gate(g) => g.targets(),
            Op::Measure { qubit, .. } => std::slice::from_ref(qubit),
        }
    }
}

/// Gate counts of a circuit.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Census {
    pub single_qubit: usize,
    pub two_qubit: usize,
    pub measurements: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    num_qubits: usize,
    num_clbits: usize,
    ops: Vec<Op>,
}

impl Circuit {
    pub fn new(num_qubits: usize) -> Self {
        Circuit {
            num_qubits,
            num_clbits: 0,
            ops: Vec::new(),
        }
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn num_clbits(&self) -> usize {
        self.num_clbits
    }

    pub fn ops(&self) -> &[Op] {
        &self.ops
    }

    pub fn len(&self) -> usize {
        self.ops.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ops.is_empty()
    }

    pub fn gate(&mut self, g: Gate) -> Result<&mut Self> {
        for &q in g.targets() {
            check_qubit(q, self.num_qubits)?;
        }
        self.ops.push(Op::Gate(g));
        Ok(self)
    }

    /// Appends a measurement writing to the next free classical bit; returns that bit.
    pub fn measure(&mut self, qubit: QubitIndex, basis: MeasurementBasis) -> Result<usize> {
        check_qubit(qubit, self.num_qubits)?;
        let clbit = self.num_clbits;
        self.num_clbits += 1;
        self.ops.push(Op::Measure { qubit, basis, clbit });
        Ok(clbit)
    }

    /// Appends all operations of `other`, renumbering its classical bits.
    pub fn extend(&mut self, other: &Circuit) -> Result<()> {
        if other.num_qubits != self.num_qubits {
            return Err(Error::WidthMismatch {
                expected: self.num_qubits,
                actual: other.num_qubits,
            });
        }
        let offset = self.num_clbits;
        for op in &other.ops {
            self.ops.push(match *op {
                Op::Measure { qubit, basis, clbit } => Op::Measure {
                    qubit,
                    basis,
                    clbit: clbit + offset,
                },
                g => g,
            });
        }
        self.num_clbits += other.num_clbits;
        Ok(())
    }

    pub fn census(&self) -> Census {
        self.ops.iter().fold(Census::default(), |mut c, op| {
            match op {
                Op::Gate(g) if g.is_two_qubit() => c.two_qubit += 1,
                Op::Gate(_) => c.single_qubit += 1,
                Op::Measure { .. } => c.measurements += 1,
            }
            c
        })
    }

    /// Qubits measured by the circuit, ordered by classical bit.
    pub fn measured_qubits(&self) -> Vec<QubitIndex> {
        let mut m: Vec<(usize, QubitIndex)> = self
            .ops
            .iter()
            .filter_map(|op| match op {
                Op::Measure { qubit, clbit, .. } => Some((*clbit, *qubit)),
                _ => None,
            })
            .collect();
        m.sort_unstable();
        m.into_iter().map(|(_, q)| q).collect()
    }

    /// Two-qubit gates in program order.
    pub fn two_qubit_gates(&self) -> impl Iterator<Item = &Gate> {
        self.ops.iter().filter_map(|op| match op {
            Op::Gate(g) if g.is_two_qubit() => Some(g),
            _ => None,
        })
    }

    /// Prefix of the circuit before the first measurement.
    pub fn unitary_prefix(&self) -> Circuit {
        let ops: Vec<Op> = self
            .ops
            .iter()
            .take_while(|op| matches!(op, Op::Gate(_)))
            .copied()
            .collect();
        Circuit {
            num_qubits: self.num_qubits,
            num_clbits: 0,
            ops,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn census_and_clbits() {
        let mut c = Circuit::new(3);
        c.gate(Gate::h(0)).unwrap().gate(Gate::cz(0, 1)).unwrap();
        assert_eq!(c.measure(2, MeasurementBasis::X).unwrap(), 0);
        assert_eq!(c.measure(1, MeasurementBasis::Z).unwrap(), 1);
        let census = c.census();
        assert_eq!((census.single_qubit, census.two_qubit, census.measurements), (1, 1, 2));
        assert_eq!(c.measured_qubits(), vec![2, 1]);
        assert_eq!(c.unitary_prefix().len(), 2);
        assert!(c.gate(Gate::h(3)).is_err());
    }
}

/// Histogram of measurement records. Keys list classical bits in order,
/// bit 0 first (e.g. `"01"` means clbit 0 read 0 and clbit 1 read 1).
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct CountsTable {
    counts: std::collections::BTreeMap<String, u64>,
    total: u64,
}

impl CountsTable {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn record(&mut self, bits: &[u8]) {
        *self.counts.entry(bits_to_string(bits)).or_insert(0) += 1;
        self.total += 1;
    }

    pub fn add(&mut self, key: impl Into<String>, count: u64) {
        *self.counts.entry(key.into()).or_insert(0) += count;
        self.total += count;
    }

    pub fn total(&self) -> u64 {
        self.total
    }

    pub fn get(&self, key: &str) -> u64 {
        self.counts.get(key).copied().unwrap_or(0)
    }

    pub fn iter(&self) -> impl Iterator<Item = (&str, u64)> {
        self.counts.iter().map(|(k, v)| (k.as_str(), *v))
    }

    pub fn merge(&mut self, other: &CountsTable) {
        for (k, v) in other.iter() {
            self.add(k, v);
        }
    }
}

pub fn bits_to_string(bits: &[u8]) -> String {
    bits.iter().map(|&b| if b == 1 { '1' } else { '0' }).collect()
}

/// Parses a pattern such as `"011"` into bits.
pub fn parse_bits(pattern: &str) -> Result<Vec<u8>> {
    pattern
        .chars()
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::Protocol(format!("invalid outcome bit {other:?} in {pattern:?}"))),
        })
        .collect()
}
