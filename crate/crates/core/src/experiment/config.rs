use std::path::PathBuf;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::noise::NoiseModel;
use crate::protocols::{
    build_linear_mbqc, build_mqnc, build_swapping, DeviceTopology, Layout, Mode, MqncStage,
    ProtocolInstance, ProtocolKind,
};
use crate::state::MAX_DENSITY_QUBITS;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ExperimentKind {
    Protocol,
    Sweep,
    Tomography,
    Chsh,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Estimator {
    #[default]
    Exact,
    Trajectories,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ProtocolName {
    Swapping,
    LinearMbqc,
    MqncStep1,
    #[default]
    MqncStep2Onward,
    MqncFull,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModeName {
    #[default]
    FeedForward,
    PostSelect,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProtocolConfig {
    #[serde(default)]
    pub kind: ProtocolName,
    /// Chain length for `linear-mbqc`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub chain_length: Option<usize>,
    /// Preset topology name (see `list-topologies`).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology: Option<String>,
    /// Topology edge-list file; takes precedence over `topology`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub topology_file: Option<PathBuf>,
    /// Physical qubit per logical qubit.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub embedding: Option<Vec<usize>>,
    #[serde(default)]
    pub mode: ModeName,
    /// Post-selection pattern, clbit 0 first; defaults per protocol.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub pattern: Option<String>,
    /// Compile each CZ as H·CX·H.
    #[serde(default)]
    pub cz_as_cx: bool,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct NoiseConfig {
    #[serde(default)]
    pub epsilon: f64,
    #[serde(default)]
    pub noisy_measurement: bool,
}

impl NoiseConfig {
    pub fn model(&self) -> Result<NoiseModel> {
        let m = NoiseModel::new(self.epsilon)
            .map_err(|_| Error::config("noise.epsilon", format!("must lie in [0, 1], got {}", self.epsilon)))?;
        Ok(m.with_noisy_measurement(self.noisy_measurement))
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Explicit grid; otherwise `points` evenly spaced values from `start` to `stop`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<Vec<f64>>,
    #[serde(default)]
    pub start: f64,
    #[serde(default = "default_stop")]
    pub stop: f64,
    #[serde(default = "default_points")]
    pub points: usize,
    /// Also sweep with the noisy-measurement flag flipped and with CZ
    /// compiled as H·CX·H, reporting each crossing.
    #[serde(default = "default_true")]
    pub sensitivity: bool,
}

impl Default for SweepConfig {
    fn default() -> Self {
        SweepConfig {
            grid: None,
            start: 0.0,
            stop: default_stop(),
            points: default_points(),
            sensitivity: true,
        }
    }
}

impl SweepConfig {
    pub fn grid(&self) -> Vec<f64> {
        if let Some(g) = &self.grid {
            return g.clone();
        }
        match self.points {
            0 => vec![],
            1 => vec![self.start],
            n => (0..n)
                .map(|i| self.start + (self.stop - self.start) * i as f64 / (n - 1) as f64)
                .collect(),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FixtureState {
    PhiPlus,
    G2,
    Werner,
    MaximallyMixed,
}

/// A fixed two-qubit state analysed instead of a protocol output.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FixtureConfig {
    pub state: FixtureState,
    /// Werner fidelity parameter.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fidelity: Option<f64>,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub json: Option<PathBuf>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub csv: Option<PathBuf>,
    /// Record the wall-clock time in the provenance block (breaks
    /// byte-identical reruns).
    #[serde(default)]
    pub timestamp: bool,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub kind: ExperimentKind,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_shots")]
    pub shots: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default)]
    pub estimator: Estimator,
    #[serde(default)]
    pub protocol: ProtocolConfig,
    #[serde(default)]
    pub noise: NoiseConfig,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepConfig>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<FixtureConfig>,
    #[serde(default)]
    pub output: OutputConfig,
}

fn default_shots() -> u64 {
    8192
}
fn default_trials() -> u64 {
    5
}
fn default_stop() -> f64 {
    0.05
}
fn default_points() -> usize {
    21
}
fn default_true() -> bool {
    true
}

/// Sets a dotted key (`noise.epsilon=0.01`) in a parsed TOML document. The
/// value is read as a TOML literal when possible and as a bare string otherwise.
pub fn apply_override(doc: &mut toml::Table, assignment: &str) -> Result<()> {
    let (key, raw) = assignment
        .split_once('=')
        .ok_or_else(|| Error::config(assignment, "override must look like key=value"))?;
    let key = key.trim();
    let raw = raw.trim();
    let value = toml::from_str::<toml::Table>(&format!("v = {raw}"))
        .ok()
        .and_then(|mut t| t.remove("v"))
        .unwrap_or_else(|| toml::Value::String(raw.to_string()));
    let parts: Vec<&str> = key.split('.').collect();
    if parts.iter().any(|p| p.is_empty()) {
        return Err(Error::config(key, "empty key segment"));
    }
    let mut table = doc;
    for part in &parts[..parts.len() - 1] {
        let entry = table
            .entry(part.to_string())
            .or_insert_with(|| toml::Value::Table(toml::Table::new()));
        table = entry
            .as_table_mut()
            .ok_or_else(|| Error::config(key, format!("`{part}` is not a table")))?;
    }
    table.insert(parts[parts.len() - 1].to_string(), value);
    Ok(())
}

impl ExperimentConfig {
    pub fn from_toml(text: &str) -> Result<Self> {
        Self::from_toml_with(text, &[])
    }

    /// Parses a config after applying dotted overrides.
    pub fn from_toml_with(text: &str, overrides: &[String]) -> Result<Self> {
        let mut doc: toml::Table =
            toml::from_str(text).map_err(|e| Error::config("<file>", e.message().to_string()))?;
        for o in overrides {
            apply_override(&mut doc, o)?;
        }
        toml::Value::Table(doc)
            .try_into()
            .map_err(|e: toml::de::Error| Error::config("<file>", e.message().to_string()))
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::config("<file>", e.to_string()))
    }

    pub fn sweep_config(&self) -> SweepConfig {
        self.sweep.clone().unwrap_or_default()
    }

    /// Field-level validation; also builds the protocol to check its embedding.
    pub fn validate(&self) -> Result<()> {
        if self.shots == 0 {
            return Err(Error::config("shots", "must be at least 1"));
        }
        if self.trials == 0 {
            return Err(Error::config("trials", "must be at least 1"));
        }
        self.noise.model()?;
        if let Some(f) = &self.fixture {
            if f.state == FixtureState::Werner {
                match f.fidelity {
                    Some(v) if (0.25..=1.0).contains(&v) => {}
                    Some(v) => return Err(Error::config("fixture.fidelity", format!("must lie in [1/4, 1], got {v}"))),
                    None => return Err(Error::config("fixture.fidelity", "required for the werner fixture")),
                }
            }
            if matches!(self.kind, ExperimentKind::Protocol | ExperimentKind::Sweep) {
                return Err(Error::config("fixture", "fixtures apply to tomography and chsh experiments only"));
            }
        }
        if self.kind == ExperimentKind::Sweep {
            let grid = self.sweep_config().grid();
            if grid.is_empty() {
                return Err(Error::config("sweep.grid", "must contain at least one point"));
            }
            if grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
                return Err(Error::config("sweep.grid", "values must lie in [0, 1]"));
            }
            if grid.windows(2).any(|w| w[1] <= w[0]) {
                return Err(Error::config("sweep.grid", "must be strictly increasing"));
            }
        }
        if self.fixture.is_none() {
            let proto = self.build_protocol()?;
            if self.estimator == Estimator::Exact && proto.circuit().num_qubits() > MAX_DENSITY_QUBITS {
                return Err(Error::config(
                    "estimator",
                    format!(
                        "{} uses {} qubits; exact evaluation supports at most {MAX_DENSITY_QUBITS}, use \"trajectories\"",
                        proto.kind(),
                        proto.circuit().num_qubits()
                    ),
                ));
            }
        }
        Ok(())
    }

    fn topology(&self) -> Result<Option<DeviceTopology>> {
        if let Some(path) = &self.protocol.topology_file {
            return DeviceTopology::load(path)
                .map(Some)
                .map_err(|e| Error::config("protocol.topology_file", e.to_string()));
        }
        match &self.protocol.topology {
            None => Ok(None),
            Some(name) => DeviceTopology::preset(name)
                .map(Some)
                .ok_or_else(|| Error::config("protocol.topology", format!("unknown topology {name:?}"))),
        }
    }

    pub fn protocol_kind(&self) -> Result<ProtocolKind> {
        Ok(match self.protocol.kind {
            ProtocolName::Swapping => ProtocolKind::Swapping,
            ProtocolName::LinearMbqc => {
                let n = self
                    .protocol
                    .chain_length
                    .ok_or_else(|| Error::config("protocol.chain_length", "required for linear-mbqc"))?;
                ProtocolKind::LinearMbqc(n)
            }
            ProtocolName::MqncStep1 => ProtocolKind::MqncStep1,
            ProtocolName::MqncStep2Onward => ProtocolKind::MqncStep2Onward,
            ProtocolName::MqncFull => ProtocolKind::MqncFull,
        })
    }

    pub fn build_protocol(&self) -> Result<ProtocolInstance> {
        let kind = self.protocol_kind()?;
        let topology = self.topology()?;
        let layout = match (&self.protocol.embedding, &topology) {
            (Some(q), Some(t)) => Some(Layout::new(t.clone(), q.clone())),
            (Some(q), None) => {
                let default = build(kind, None)?;
                Some(Layout::new(default.topology().clone(), q.clone()))
            }
            (None, _) => None,
        };
        let mut proto = build(kind, layout)?;
        if let (None, Some(t)) = (&self.protocol.embedding, &topology) {
            proto.validate_embedding(t).into_result()?;
        }
        if self.protocol.cz_as_cx {
            proto = proto.with_cz_as_cx();
        }
        let mode = match self.protocol.mode {
            ModeName::FeedForward => Mode::FeedForward,
            ModeName::PostSelect => {
                Mode::PostSelect(self.protocol.pattern.clone().unwrap_or_else(|| kind.default_pattern()))
            }
        };
        proto
            .with_mode(mode)
            .map_err(|e| Error::config("protocol.pattern", e.to_string()))
    }
}

fn build(kind: ProtocolKind, layout: Option<Layout>) -> Result<ProtocolInstance> {
    match kind {
        ProtocolKind::Swapping => build_swapping(layout, Mode::FeedForward),
        ProtocolKind::LinearMbqc(n) => build_linear_mbqc(n, layout, Mode::FeedForward),
        ProtocolKind::MqncStep1 => build_mqnc(MqncStage::Step1, layout, Mode::FeedForward),
        ProtocolKind::MqncStep2Onward => build_mqnc(MqncStage::Step2Onward, layout, Mode::FeedForward),
        ProtocolKind::MqncFull => build_mqnc(MqncStage::Full, layout, Mode::FeedForward),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    const SAMPLE: &str = r#"
kind = "sweep"
seed = 7

[protocol]
kind = "mqnc-step2-onward"
topology = "tokyo-subgraph"
embedding = [0, 10, 5, 6, 11, 1]

[noise]
noisy_measurement = true

[sweep]
points = 11
"#;

    #[test]
    fn parse_defaults_and_round_trip() {
        let c = ExperimentConfig::from_toml(SAMPLE).unwrap();
        assert_eq!(c.shots, 8192);
        assert_eq!(c.trials, 5);
        assert_eq!(c.sweep_config().grid().len(), 11);
        assert!((c.sweep_config().grid()[10] - 0.05).abs() < 1e-15);
        let again = ExperimentConfig::from_toml(&c.to_toml().unwrap()).unwrap();
        assert_eq!(again, c);
        c.validate().unwrap();
    }

    #[test]
    fn dotted_overrides() {
        let c = ExperimentConfig::from_toml_with(
            SAMPLE,
            &[
                "noise.epsilon=0.02".into(),
                "protocol.mode=post-select".into(),
                "output.json=out/r.json".into(),
            ],
        )
        .unwrap();
        assert_eq!(c.noise.epsilon, 0.02);
        assert_eq!(c.protocol.mode, ModeName::PostSelect);
        assert_eq!(c.output.json, Some(PathBuf::from("out/r.json")));
        assert_eq!(c.build_protocol().unwrap().mode(), &Mode::PostSelect("11".into()));
        assert!(ExperimentConfig::from_toml_with(SAMPLE, &["noepsilon".into()]).is_err());
    }

    #[test]
    fn field_level_errors() {
        let bad = |o: &str| {
            ExperimentConfig::from_toml_with(SAMPLE, &[o.into()])
                .and_then(|c| c.validate())
                .unwrap_err()
        };
        assert!(matches!(bad("shots=0"), Error::Config { field, .. } if field == "shots"));
        assert!(matches!(bad("noise.epsilon=1.5"), Error::Config { field, .. } if field == "noise.epsilon"));
        assert!(matches!(bad("protocol.topology=\"mars\""), Error::Config { field, .. } if field == "protocol.topology"));
        assert!(matches!(bad("sweep.grid=[0.02, 0.01]"), Error::Config { field, .. } if field == "sweep.grid"));
        assert!(matches!(bad("protocol.embedding=[0, 10, 5, 6, 11, 2]"), Error::Embedding { .. }));
        let wide = ExperimentConfig::from_toml("kind = \"protocol\"\n[protocol]\nkind = \"mqnc-full\"\n").unwrap();
        assert!(matches!(wide.validate().unwrap_err(), Error::Config { field, .. } if field == "estimator"));
        assert!(ExperimentConfig::from_toml("kind = \"sweep\"\nbogus = 1\n").is_err());
    }
}
