use serde::Serialize;

use super::config::{Estimator, ExperimentConfig, ExperimentKind, FixtureConfig, FixtureState};
use crate::analysis::{
    chsh_from_counts, concurrence, correlation_from_counts, correlation_from_state, epsilon_sweep,
    fidelity_pure, mean_stderr, pair_chsh, protocol_chsh_counts, protocol_setting_counts,
    simulate_chsh_counts, simulate_setting_counts, tomography_from_counts, tomography_from_state,
    werner_s, werner_state, ChshSettings, CorrelationMatrix, SweepMode, SweepResult,
    TomographyEstimate,
};
use crate::error::{Error, Result};
use crate::noise::{derive_seed, NoiseModel};
use crate::protocols::{PairTarget, ProtocolInstance};
use crate::state::{DensityMatrix, MeasurementBasis};

#[derive(Clone, Debug, Serialize)]
pub struct Provenance {
    pub seed: u64,
    pub version: &'static str,
    /// Seconds since the Unix epoch; only present when requested.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp_unix: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ResultRecord {
    pub config: ExperimentConfig,
    pub provenance: Provenance,
    pub results: Results,
}

#[derive(Clone, Debug, Serialize)]
#[serde(tag = "type", rename_all = "kebab-case")]
pub enum Results {
    Protocol(ProtocolReport),
    Sweep(SweepReport),
    Tomography(TomographyReport),
    Chsh(ChshReport),
}

#[derive(Clone, Debug, Serialize)]
pub struct PairReport {
    pub label: String,
    pub estimator: &'static str,
    pub fidelity: f64,
    pub fidelity_stderr: Option<f64>,
    pub concurrence: Option<f64>,
    pub s: f64,
    pub s_stderr: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ProtocolReport {
    pub protocol: String,
    pub mode: String,
    pub estimator: &'static str,
    pub topology: String,
    pub embedding: Vec<usize>,
    pub embedding_violations: Vec<(usize, usize)>,
    pub acceptance: f64,
    pub fidelity: f64,
    pub fidelity_stderr: Option<f64>,
    pub pairs: Vec<PairReport>,
    /// Roles of the output qubits, in correlation-matrix order.
    pub output_roles: Vec<String>,
    /// `<Z_i Z_j>` over the output after each pair's Bell transform.
    pub correlation: Option<CorrelationMatrix>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SensitivityEntry {
    pub noisy_measurement: bool,
    pub cz_as_cx: bool,
    pub epsilon_crit: Option<f64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SweepReport {
    pub sweep: SweepResult,
    /// Crossing under every combination of measurement noise and CZ compilation.
    pub sensitivity: Vec<SensitivityEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TomographyEntry {
    pub label: String,
    pub real: Vec<Vec<f64>>,
    pub imag: Vec<Vec<f64>>,
    pub fidelity: f64,
    /// Trace distance to the exactly computed state, when available.
    pub trace_distance: Option<f64>,
    pub projection_applied: bool,
    pub shots_per_setting: Option<u64>,
}

#[derive(Clone, Debug, Serialize)]
pub struct TomographyReport {
    pub source: String,
    pub estimator: &'static str,
    pub entries: Vec<TomographyEntry>,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChshEntry {
    pub label: String,
    pub s: f64,
    pub stderr: Option<f64>,
    pub violates_classical_bound: bool,
}

#[derive(Clone, Debug, Serialize)]
pub struct ChshReport {
    pub source: String,
    pub estimator: &'static str,
    pub entries: Vec<ChshEntry>,
}

fn estimator_label(e: Estimator) -> &'static str {
    match e {
        Estimator::Exact => "exact",
        Estimator::Trajectories => "shot-sampled",
    }
}

/// Validates and runs an experiment. Nothing is written; see [`super::emit`].
pub fn run(config: &ExperimentConfig) -> Result<ResultRecord> {
    config.validate()?;
    let results = match config.kind {
        ExperimentKind::Protocol => Results::Protocol(run_protocol(config)?),
        ExperimentKind::Sweep => Results::Sweep(run_sweep(config)?),
        ExperimentKind::Tomography => Results::Tomography(run_tomography(config)?),
        ExperimentKind::Chsh => Results::Chsh(run_chsh(config)?),
    };
    let timestamp_unix = config.output.timestamp.then(|| {
        std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0)
    });
    Ok(ResultRecord {
        config: config.clone(),
        provenance: Provenance {
            seed: config.seed,
            version: env!("CARGO_PKG_VERSION"),
            timestamp_unix,
        },
        results,
    })
}

/// Output state with each pair mapped to `|Φ+>`.
fn bell_frame(proto: &ProtocolInstance, state: &DensityMatrix) -> Result<DensityMatrix> {
    let mut s = state.clone();
    for p in proto.pairs() {
        for (q, u) in p.target.bell_transform() {
            s.apply_matrix(p.positions[q], &u)?;
        }
    }
    Ok(s)
}

fn pair_metrics(proto: &ProtocolInstance, state: &DensityMatrix) -> Result<Vec<(f64, f64, f64)>> {
    let settings = ChshSettings::default();
    proto
        .pairs()
        .iter()
        .map(|p| {
            let rho = state.partial_trace(&p.positions)?;
            Ok((
                fidelity_pure(&rho, &p.target.state())?,
                concurrence(&rho)?,
                pair_chsh(&rho, p.target, &settings)?,
            ))
        })
        .collect()
}

fn run_protocol(config: &ExperimentConfig) -> Result<ProtocolReport> {
    let proto = config.build_protocol()?;
    let model = config.noise.model()?;
    let report = proto.validate_embedding(proto.topology());
    let output_roles = proto.output().iter().map(|&q| proto.roles()[q].clone()).collect();
    let mut out = ProtocolReport {
        protocol: proto.kind().to_string(),
        mode: proto.mode().label(),
        estimator: estimator_label(config.estimator),
        topology: proto.topology().name().to_string(),
        embedding: proto.embedding().to_vec(),
        embedding_violations: report.violations,
        acceptance: 0.0,
        fidelity: 0.0,
        fidelity_stderr: None,
        pairs: vec![],
        output_roles,
        correlation: None,
    };
    match config.estimator {
        Estimator::Exact => {
            let res = proto.evaluate_exact(&model)?;
            let state = res.state.as_ref().expect("exact evaluation keeps the state");
            out.acceptance = res.acceptance;
            out.fidelity = res.fidelity;
            out.pairs = proto
                .pairs()
                .iter()
                .zip(pair_metrics(&proto, state)?)
                .map(|(p, (f, c, s))| PairReport {
                    label: p.label.clone(),
                    estimator: "exact",
                    fidelity: f,
                    fidelity_stderr: None,
                    concurrence: Some(c),
                    s,
                    s_stderr: None,
                })
                .collect();
            if !proto.pairs().is_empty() {
                out.correlation = Some(correlation_from_state(&bell_frame(&proto, state)?)?);
            }
        }
        Estimator::Trajectories => {
            let mut fids = Vec::new();
            let mut acceptance = Vec::new();
            let mut per_pair = vec![(Vec::new(), Vec::new(), Vec::new()); proto.pairs().len()];
            for t in 0..config.trials {
                let res = proto.evaluate_trajectories(&model, config.shots, derive_seed(config.seed, t))?;
                fids.push(res.fidelity);
                acceptance.push(res.acceptance);
                if let Some(state) = &res.state {
                    for (acc, (f, c, s)) in per_pair.iter_mut().zip(pair_metrics(&proto, state)?) {
                        acc.0.push(f);
                        acc.1.push(c);
                        acc.2.push(s);
                    }
                }
            }
            let (f, fe) = mean_stderr(&fids);
            out.fidelity = f;
            out.fidelity_stderr = Some(fe);
            out.acceptance = mean_stderr(&acceptance).0;
            out.pairs = proto
                .pairs()
                .iter()
                .zip(&per_pair)
                .map(|(p, (f, c, s))| {
                    let (fm, fe) = mean_stderr(f);
                    let (sm, se) = mean_stderr(s);
                    PairReport {
                        label: p.label.clone(),
                        estimator: "shot-sampled",
                        fidelity: fm,
                        fidelity_stderr: Some(fe),
                        concurrence: Some(mean_stderr(c).0),
                        s: sm,
                        s_stderr: Some(se),
                    }
                })
                .collect();
            if !proto.pairs().is_empty() {
                let mut rotations = Vec::new();
                for p in proto.pairs() {
                    for (q, u) in p.target.bell_transform() {
                        rotations.push((p.positions[q], u));
                    }
                }
                let bases = vec![MeasurementBasis::Z; proto.output().len()];
                let counts = proto.sample_output_counts(
                    &model,
                    config.shots,
                    derive_seed(config.seed, config.trials),
                    &rotations,
                    &bases,
                )?;
                out.correlation = Some(correlation_from_counts(&counts)?);
            }
        }
    }
    Ok(out)
}

fn run_sweep(config: &ExperimentConfig) -> Result<SweepReport> {
    let sweep_cfg = config.sweep_config();
    let grid = sweep_cfg.grid();
    let mode = match config.estimator {
        Estimator::Exact => SweepMode::Exact,
        Estimator::Trajectories => SweepMode::Trajectories {
            shots: config.shots,
            repeats: config.trials,
        },
    };
    let template = config.noise.model()?;
    let proto = config.build_protocol()?;
    let sweep = epsilon_sweep(&proto, &grid, mode, &template, config.seed)?;
    let mut sensitivity = Vec::new();
    if sweep_cfg.sensitivity {
        for noisy_measurement in [false, true] {
            for cz_as_cx in [false, true] {
                let mut variant = config.clone();
                variant.noise.noisy_measurement = noisy_measurement;
                variant.protocol.cz_as_cx = cz_as_cx;
                let same = noisy_measurement == config.noise.noisy_measurement
                    && cz_as_cx == config.protocol.cz_as_cx;
                let crit = if same {
                    sweep.epsilon_crit.value
                } else {
                    let p = variant.build_protocol()?;
                    let t = variant.noise.model()?;
                    epsilon_sweep(&p, &grid, mode, &t, config.seed)?.epsilon_crit.value
                };
                sensitivity.push(SensitivityEntry {
                    noisy_measurement,
                    cz_as_cx,
                    epsilon_crit: crit,
                });
            }
        }
    }
    Ok(SweepReport { sweep, sensitivity })
}

fn fixture(f: &FixtureConfig) -> Result<(DensityMatrix, PairTarget)> {
    Ok(match f.state {
        FixtureState::PhiPlus => (PairTarget::PhiPlus.state().to_density()?, PairTarget::PhiPlus),
        FixtureState::G2 => (PairTarget::G2.state().to_density()?, PairTarget::G2),
        FixtureState::Werner => (
            werner_state(f.fidelity.ok_or_else(|| Error::config("fixture.fidelity", "missing"))?)?,
            PairTarget::G2,
        ),
        FixtureState::MaximallyMixed => (DensityMatrix::maximally_mixed(2)?, PairTarget::PhiPlus),
    })
}

fn fixture_label(f: &FixtureConfig) -> String {
    match f.state {
        FixtureState::PhiPlus => "phi-plus".into(),
        FixtureState::G2 => "g2".into(),
        FixtureState::Werner => format!("werner({})", f.fidelity.unwrap_or(f64::NAN)),
        FixtureState::MaximallyMixed => "maximally-mixed".into(),
    }
}

fn tomography_entry(
    label: String,
    est: &TomographyEstimate,
    target: PairTarget,
    truth: Option<&DensityMatrix>,
) -> Result<TomographyEntry> {
    let dim = est.rho.dim();
    let part = |f: fn(&num_complex::Complex64) -> f64| {
        (0..dim)
            .map(|r| (0..dim).map(|c| f(&est.rho.get(r, c))).collect())
            .collect()
    };
    Ok(TomographyEntry {
        label,
        real: part(|z| z.re),
        imag: part(|z| z.im),
        fidelity: fidelity_pure(&est.rho, &target.state())?,
        trace_distance: truth.map(|t| est.rho.trace_distance(t)).transpose()?,
        projection_applied: est.projection_applied,
        shots_per_setting: est.shots_per_setting,
    })
}

fn exact_pair_states(proto: &ProtocolInstance, model: &NoiseModel) -> Result<Option<Vec<DensityMatrix>>> {
    if proto.circuit().num_qubits() > crate::state::MAX_DENSITY_QUBITS {
        return Ok(None);
    }
    Ok(Some(proto.evaluate_exact(model)?.pair_states()?))
}

fn run_tomography(config: &ExperimentConfig) -> Result<TomographyReport> {
    let estimator = estimator_label(config.estimator);
    if let Some(f) = &config.fixture {
        let (rho, target) = fixture(f)?;
        let est = match config.estimator {
            Estimator::Exact => tomography_from_state(&rho)?,
            Estimator::Trajectories => {
                tomography_from_counts(2, &simulate_setting_counts(&rho, config.shots, config.seed)?)?
            }
        };
        return Ok(TomographyReport {
            source: format!("fixture:{}", fixture_label(f)),
            estimator,
            entries: vec![tomography_entry(fixture_label(f), &est, target, Some(&rho))?],
        });
    }
    let proto = config.build_protocol()?;
    if proto.pairs().is_empty() {
        return Err(Error::config("protocol.kind", format!("{} distributes no pairs", proto.kind())));
    }
    let model = config.noise.model()?;
    let truth = exact_pair_states(&proto, &model)?;
    let estimates: Vec<TomographyEstimate> = match config.estimator {
        Estimator::Exact => truth
            .as_ref()
            .expect("validated width")
            .iter()
            .map(tomography_from_state)
            .collect::<Result<_>>()?,
        Estimator::Trajectories => {
            let groups: Vec<Vec<usize>> = proto.pairs().iter().map(|p| p.positions.to_vec()).collect();
            protocol_setting_counts(&proto, &model, &groups, config.shots, config.seed)?
                .iter()
                .map(|d| tomography_from_counts(2, d))
                .collect::<Result<_>>()?
        }
    };
    let entries = proto
        .pairs()
        .iter()
        .zip(&estimates)
        .enumerate()
        .map(|(i, (p, est))| {
            tomography_entry(p.label.clone(), est, p.target, truth.as_ref().map(|t| &t[i]))
        })
        .collect::<Result<_>>()?;
    Ok(TomographyReport {
        source: format!("protocol:{}", proto.kind()),
        estimator,
        entries,
    })
}

fn run_chsh(config: &ExperimentConfig) -> Result<ChshReport> {
    let settings = ChshSettings::default();
    let estimator = estimator_label(config.estimator);
    let entry = |label: String, s: f64, stderr: Option<f64>| ChshEntry {
        label,
        s,
        stderr,
        violates_classical_bound: s > 2.0,
    };
    if let Some(f) = &config.fixture {
        let (rho, target) = fixture(f)?;
        let (s, se) = match config.estimator {
            Estimator::Exact => (pair_chsh(&rho, target, &settings)?, None),
            Estimator::Trajectories => {
                let counts = simulate_chsh_counts(&rho, target, &settings, config.shots, config.seed)?;
                let est = chsh_from_counts(&settings, &counts, [0, 1])?;
                (est.s, Some(est.stderr))
            }
        };
        let mut entries = vec![entry(fixture_label(f), s, se)];
        if let (FixtureState::Werner, Some(fid)) = (f.state, f.fidelity) {
            entries.push(entry("werner-closed-form".into(), werner_s(fid), None));
        }
        return Ok(ChshReport {
            source: format!("fixture:{}", fixture_label(f)),
            estimator,
            entries,
        });
    }
    let proto = config.build_protocol()?;
    if proto.pairs().is_empty() {
        return Err(Error::config("protocol.kind", format!("{} distributes no pairs", proto.kind())));
    }
    let model = config.noise.model()?;
    let entries = match config.estimator {
        Estimator::Exact => {
            let states = exact_pair_states(&proto, &model)?.expect("validated width");
            proto
                .pairs()
                .iter()
                .zip(&states)
                .map(|(p, rho)| Ok(entry(p.label.clone(), pair_chsh(rho, p.target, &settings)?, None)))
                .collect::<Result<_>>()?
        }
        Estimator::Trajectories => {
            let counts = protocol_chsh_counts(&proto, &model, &settings, config.shots, config.seed)?;
            proto
                .pairs()
                .iter()
                .map(|p| {
                    let est = chsh_from_counts(&settings, &counts, p.positions)?;
                    Ok(entry(p.label.clone(), est.s, Some(est.stderr)))
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(ChshReport {
        source: format!("protocol:{}", proto.kind()),
        estimator,
        entries,
    })
}
