use serde::{Deserialize, Serialize};

use crate::circuit::CountsTable;
use crate::error::{Error, Result};
use crate::gate;
use crate::state::DensityMatrix;

/// Fewer shots than this are rejected as too noisy to report.
pub const MIN_CORRELATION_SHOTS: u64 = 100;

/// `<Z_i Z_j>` over a register; the diagonal is 1 by definition.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CorrelationMatrix {
    pub values: Vec<Vec<f64>>,
    /// Binomial standard errors, for count-based estimates.
    pub stderr: Option<Vec<Vec<f64>>>,
    pub shots: Option<u64>,
}

/// Estimates the matrix from computational-basis counts (one key character per qubit).
pub fn correlation_from_counts(counts: &CountsTable) -> Result<CorrelationMatrix> {
    let n = counts.total();
    if n < MIN_CORRELATION_SHOTS {
        return Err(Error::Analysis(format!(
            "correlation matrix needs at least {MIN_CORRELATION_SHOTS} shots, got {n}"
        )));
    }
    let width = counts.iter().next().map_or(0, |(k, _)| k.len());
    let mut values = vec![vec![1.0; width]; width];
    let mut stderr = vec![vec![0.0; width]; width];
    for i in 0..width {
        for j in 0..width {
            if i == j {
                continue;
            }
            let sum: i64 = counts
                .iter()
                .map(|(k, c)| {
                    let b = k.as_bytes();
                    if b[i] == b[j] { c as i64 } else { -(c as i64) }
                })
                .sum();
            let e = sum as f64 / n as f64;
            values[i][j] = e;
            stderr[i][j] = ((1.0 - e * e) / n as f64).sqrt();
        }
    }
    Ok(CorrelationMatrix {
        values,
        stderr: Some(stderr),
        shots: Some(n),
    })
}

/// Exact matrix of a state.
pub fn correlation_from_state(rho: &DensityMatrix) -> Result<CorrelationMatrix> {
    let n = rho.num_qubits();
    let mut values = vec![vec![1.0; n]; n];
    for i in 0..n {
        for j in 0..n {
            if i != j {
                values[i][j] = rho.expectation_local(&[(i, gate::Z), (j, gate::Z)])?;
            }
        }
    }
    Ok(CorrelationMatrix {
        values,
        stderr: None,
        shots: None,
    })
}
