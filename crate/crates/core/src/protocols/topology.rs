//! Device coupling maps and embedding checks.

use std::collections::BTreeSet;
use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::circuit::Circuit;
use crate::error::{Error, Result};

/// Qubits of the 20-qubit Tokyo device whose couplings are used here.
pub const TOKYO_QUBITS: [usize; 8] = [0, 1, 5, 6, 10, 11, 15, 16];

const TOKYO_EDGES: [(usize, usize); 12] = [
    (0, 1),
    (0, 5),
    (1, 6),
    (5, 6),
    (5, 10),
    (5, 11),
    (6, 10),
    (6, 11),
    (10, 11),
    (10, 15),
    (11, 16),
    (15, 16),
];

/// Links (Bell pairs, first qubit is the CX control) and intra-node
/// couplings of the 14-qubit network layout. Qubits 0..6 are the kept
/// qubits of nodes s1, s2, r1, r2, t1, t2; 6..14 are removed in Step 2.
pub(crate) const NETWORK_LINKS: [(usize, usize); 7] =
    [(0, 2), (1, 8), (9, 3), (10, 12), (11, 13), (6, 5), (7, 4)];
pub(crate) const NETWORK_LOCAL: [(usize, usize); 10] = [
    (0, 6),
    (1, 7),
    (2, 8),
    (2, 9),
    (8, 9),
    (3, 10),
    (3, 11),
    (10, 11),
    (4, 12),
    (5, 13),
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DeviceTopology {
    name: String,
    num_qubits: usize,
    edges: BTreeSet<(usize, usize)>,
}

impl DeviceTopology {
    pub fn new(name: impl Into<String>, num_qubits: usize, edges: &[(usize, usize)]) -> Result<Self> {
        let mut set = BTreeSet::new();
        for &(a, b) in edges {
            if a == b {
                return Err(Error::TopologyFile(format!("self-loop on qubit {a}")));
            }
            if a >= num_qubits || b >= num_qubits {
                return Err(Error::TopologyFile(format!(
                    "edge ({a}, {b}) outside a {num_qubits}-qubit device"
                )));
            }
            set.insert((a.min(b), a.max(b)));
        }
        Ok(DeviceTopology {
            name: name.into(),
            num_qubits,
            edges: set,
        })
    }

    /// Couplings among qubits {0,1,5,6,10,11,15,16} of the 20-qubit Tokyo device.
    pub fn tokyo_subgraph() -> Self {
        Self::new("tokyo-subgraph", 20, &TOKYO_EDGES).expect("valid preset")
    }

    /// Logical 14-qubit layout of the full network-coding protocol: one
    /// coupling per network link plus the intra-node couplings.
    pub fn mqnc_network() -> Self {
        let edges: Vec<_> = NETWORK_LINKS.iter().chain(&NETWORK_LOCAL).copied().collect();
        Self::new("mqnc-network", 14, &edges).expect("valid preset")
    }

    /// Nearest-neighbour line `0-1-…-(n-1)`.
    pub fn line(n: usize) -> Self {
        let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
        Self::new(format!("line-{n}"), n, &edges).expect("valid preset")
    }

    pub fn presets() -> Vec<DeviceTopology> {
        vec![Self::tokyo_subgraph(), Self::mqnc_network()]
    }

    /// Looks up a preset by name (`line-N` for any `N ≥ 2`).
    pub fn preset(name: &str) -> Option<Self> {
        if let Some(n) = name.strip_prefix("line-").and_then(|n| n.parse().ok()) {
            return (n >= 2).then(|| Self::line(n));
        }
        Self::presets().into_iter().find(|t| t.name == name)
    }

    /// Parses a plain-text edge list: a `name: <name>` header, optional
    /// `qubits: <count>`, then one `i j` pair per line. `#` starts a comment.
    pub fn parse(text: &str) -> Result<Self> {
        let mut name = None;
        let mut count = None;
        let mut edges = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let bad = |what: &str| Error::TopologyFile(format!("line {}: {what}: {raw:?}", lineno + 1));
            if let Some(rest) = line.strip_prefix("name:") {
                name = Some(rest.trim().to_string());
            } else if let Some(rest) = line.strip_prefix("qubits:") {
                count = Some(rest.trim().parse::<usize>().map_err(|_| bad("bad qubit count"))?);
            } else {
                let mut it = line.split_whitespace().map(str::parse::<usize>);
                match (it.next(), it.next(), it.next()) {
                    (Some(Ok(a)), Some(Ok(b)), None) => edges.push((a, b)),
                    _ => return Err(bad("expected two qubit indices")),
                }
            }
        }
        let name = name.ok_or_else(|| Error::TopologyFile("missing `name:` header".into()))?;
        let max = edges.iter().map(|&(a, b)| a.max(b) + 1).max().unwrap_or(0);
        let num_qubits = count.unwrap_or(max);
        Self::new(name, num_qubits, &edges)
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Text form accepted by [`DeviceTopology::parse`].
    pub fn to_text(&self) -> String {
        let mut s = format!("name: {}\nqubits: {}\n", self.name, self.num_qubits);
        for (a, b) in &self.edges {
            s.push_str(&format!("{a} {b}\n"));
        }
        s
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.edges.iter().copied()
    }

    pub fn coupled(&self, a: usize, b: usize) -> bool {
        self.edges.contains(&(a.min(b), a.max(b)))
    }
}

impl fmt::Display for DeviceTopology {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{} ({} qubits, {} couplings)", self.name, self.num_qubits, self.edges.len())
    }
}

/// Outcome of checking a circuit's two-qubit gates against a coupling map.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct EmbeddingReport {
    pub topology: String,
    /// Physical qubit pairs used by two-qubit gates but not coupled.
    pub violations: Vec<(usize, usize)>,
    /// Physical qubits beyond the device size.
    pub out_of_range: Vec<usize>,
}

impl EmbeddingReport {
    pub fn is_ok(&self) -> bool {
        self.violations.is_empty() && self.out_of_range.is_empty()
    }

    pub fn into_result(self) -> Result<()> {
        if self.is_ok() {
            return Ok(());
        }
        let mut pairs = self.violations;
        pairs.extend(self.out_of_range.iter().map(|&q| (q, q)));
        Err(Error::Embedding {
            topology: self.topology,
            pairs,
        })
    }
}

/// Maps every two-qubit gate of `circuit` through `embedding` (logical →
/// physical) and lists those not supported by `topology`.
pub fn check_circuit(topology: &DeviceTopology, embedding: &[usize], circuit: &Circuit) -> EmbeddingReport {
    let mut out_of_range: Vec<usize> = embedding
        .iter()
        .copied()
        .filter(|&q| q >= topology.num_qubits())
        .collect();
    out_of_range.dedup();
    let mut violations = Vec::new();
    for g in circuit.two_qubit_gates() {
        let t = g.targets();
        let (a, b) = (embedding[t[0]], embedding[t[1]]);
        let pair = (a.min(b), a.max(b));
        if !topology.coupled(a, b) && !violations.contains(&pair) {
            violations.push(pair);
        }
    }
    EmbeddingReport {
        topology: topology.name().to_string(),
        violations,
        out_of_range,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_round_trip() {
        let t = DeviceTopology::tokyo_subgraph();
        assert_eq!(DeviceTopology::parse(&t.to_text()).unwrap(), t);
        let u = DeviceTopology::parse("# demo\nname: tri\n0 1\n1 2 # link\n2 0\n").unwrap();
        assert_eq!(u.num_qubits(), 3);
        assert!(u.coupled(0, 2));
    }

    #[test]
    fn parse_errors() {
        assert!(DeviceTopology::parse("0 1\n").is_err());
        assert!(DeviceTopology::parse("name: x\n0 0\n").is_err());
        assert!(DeviceTopology::parse("name: x\n0 a\n").is_err());
        assert!(DeviceTopology::parse("name: x\nqubits: 2\n0 3\n").is_err());
    }

    #[test]
    fn presets_by_name() {
        assert_eq!(DeviceTopology::preset("tokyo-subgraph").unwrap().edges().count(), 12);
        assert_eq!(DeviceTopology::preset("mqnc-network").unwrap().edges().count(), 17);
        assert_eq!(DeviceTopology::preset("line-4").unwrap().edges().count(), 3);
        assert!(DeviceTopology::preset("nope").is_none());
    }
}
