//! Noise-rate sweeps and the critical error rate at which `S` drops to 2.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::{fidelity_pure, mean_stderr, pair_chsh, protocol_setting_counts, tomography_from_counts, ChshSettings};
use crate::error::{Error, Result};
use crate::noise::{derive_seed, NoiseModel};
use crate::protocols::ProtocolInstance;

/// The classical CHSH bound.
const CLASSICAL_BOUND: f64 = 2.0;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum SweepMode {
    /// Density-matrix evaluation of each pair.
    Exact,
    /// Tomography of sampled trajectories, repeated for error bars.
    Trajectories { shots: u64, repeats: u64 },
}

impl SweepMode {
    pub fn estimator(&self) -> &'static str {
        match self {
            SweepMode::Exact => "exact",
            SweepMode::Trajectories { .. } => "shot-sampled",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairPoint {
    pub label: String,
    pub fidelity: f64,
    pub fidelity_stderr: f64,
    pub s: f64,
    pub s_stderr: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub epsilon: f64,
    pub pairs: Vec<PairPoint>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CurveCrit {
    pub label: String,
    pub value: Option<f64>,
    /// Crossings of `S − stderr` and `S + stderr`.
    pub interval: Option<(f64, f64)>,
    /// The `S` sequence increased somewhere and was replaced by its
    /// best non-increasing fit before interpolation.
    pub smoothed: bool,
    /// The increase exceeded three standard errors.
    pub flagged: bool,
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CritReport {
    /// Smallest crossing over all pairs (the rate at which the first pair
    /// stops violating the bound).
    pub value: Option<f64>,
    pub per_pair: Vec<CurveCrit>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub protocol: String,
    pub estimator: String,
    pub noisy_measurement: bool,
    pub seed: u64,
    pub points: Vec<SweepPoint>,
    pub epsilon_crit: CritReport,
}

impl SweepResult {
    /// Assembles a result from points, computing the crossing.
    pub fn from_points(
        protocol: String,
        estimator: String,
        noisy_measurement: bool,
        seed: u64,
        points: Vec<SweepPoint>,
    ) -> Self {
        let mut r = SweepResult {
            protocol,
            estimator,
            noisy_measurement,
            seed,
            points,
            epsilon_crit: CritReport {
                value: None,
                per_pair: vec![],
            },
        };
        r.epsilon_crit = epsilon_crit(&r);
        r
    }

    pub fn pair_labels(&self) -> Vec<String> {
        self.points
            .first()
            .map(|p| p.pairs.iter().map(|q| q.label.clone()).collect())
            .unwrap_or_default()
    }
}

fn check_grid(grid: &[f64]) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::Analysis("empty epsilon grid".into()));
    }
    if grid.iter().any(|e| !(0.0..=1.0).contains(e)) {
        return Err(Error::Analysis("epsilon grid must lie in [0, 1]".into()));
    }
    if grid.windows(2).any(|w| w[1] <= w[0]) {
        return Err(Error::Analysis("epsilon grid must be strictly increasing".into()));
    }
    Ok(())
}

fn exact_point(proto: &ProtocolInstance, model: &NoiseModel) -> Result<Vec<PairPoint>> {
    let out = proto.evaluate_exact(model)?;
    let settings = ChshSettings::default();
    out.pair_states()?
        .iter()
        .zip(&out.pairs)
        .map(|(rho, p)| {
            Ok(PairPoint {
                label: p.label.clone(),
                fidelity: fidelity_pure(rho, &p.target.state())?,
                fidelity_stderr: 0.0,
                s: pair_chsh(rho, p.target, &settings)?,
                s_stderr: 0.0,
            })
        })
        .collect()
}

fn sampled_point(
    proto: &ProtocolInstance,
    model: &NoiseModel,
    shots: u64,
    repeats: u64,
    seed: u64,
) -> Result<Vec<PairPoint>> {
    let settings = ChshSettings::default();
    let groups: Vec<Vec<usize>> = proto.pairs().iter().map(|p| p.positions.to_vec()).collect();
    let mut f = vec![Vec::new(); groups.len()];
    let mut s = vec![Vec::new(); groups.len()];
    for r in 0..repeats {
        let data = protocol_setting_counts(proto, model, &groups, shots, derive_seed(seed, r))?;
        for (i, (pair, counts)) in proto.pairs().iter().zip(&data).enumerate() {
            let est = tomography_from_counts(2, counts)?;
            f[i].push(fidelity_pure(&est.rho, &pair.target.state())?);
            s[i].push(pair_chsh(&est.rho, pair.target, &settings)?);
        }
    }
    Ok(proto
        .pairs()
        .iter()
        .enumerate()
        .map(|(i, p)| {
            let (fm, fe) = mean_stderr(&f[i]);
            let (sm, se) = mean_stderr(&s[i]);
            PairPoint {
                label: p.label.clone(),
                fidelity: fm,
                fidelity_stderr: fe,
                s: sm,
                s_stderr: se,
            }
        })
        .collect())
}

/// Evaluates every pair of `proto` at each noise rate of `grid`; the
/// `noisy_measurement` flag is taken from `template`.
pub fn epsilon_sweep(
    proto: &ProtocolInstance,
    grid: &[f64],
    mode: SweepMode,
    template: &NoiseModel,
    seed: u64,
) -> Result<SweepResult> {
    check_grid(grid)?;
    if proto.pairs().is_empty() {
        return Err(Error::Analysis(format!("{} distributes no pairs", proto.kind())));
    }
    let model = |eps: f64| NoiseModel {
        epsilon: eps,
        ..*template
    };
    let points: Vec<SweepPoint> = match mode {
        SweepMode::Exact => grid
            .par_iter()
            .map(|&eps| {
                Ok(SweepPoint {
                    epsilon: eps,
                    pairs: exact_point(proto, &model(eps))?,
                })
            })
            .collect::<Result<_>>()?,
        SweepMode::Trajectories { shots, repeats } => {
            if shots == 0 || repeats == 0 {
                return Err(Error::Analysis("shots and repeats must be positive".into()));
            }
            grid.iter()
                .enumerate()
                .map(|(i, &eps)| {
                    Ok(SweepPoint {
                        epsilon: eps,
                        pairs: sampled_point(proto, &model(eps), shots, repeats, derive_seed(seed, i as u64))?,
                    })
                })
                .collect::<Result<_>>()?
        }
    };
    Ok(SweepResult::from_points(
        proto.kind().to_string(),
        mode.estimator().to_string(),
        template.noisy_measurement,
        seed,
        points,
    ))
}

/// Best non-increasing least-squares fit (pool-adjacent-violators).
fn non_increasing_fit(ys: &[f64]) -> Vec<f64> {
    let mut blocks: Vec<(f64, usize)> = Vec::new();
    for &y in ys {
        blocks.push((y, 1));
        while blocks.len() > 1 {
            let (b, nb) = blocks[blocks.len() - 1];
            let (a, na) = blocks[blocks.len() - 2];
            if b <= a {
                break;
            }
            blocks.pop();
            let n = na + nb;
            *blocks.last_mut().expect("non-empty") = ((a * na as f64 + b * nb as f64) / n as f64, n);
        }
    }
    blocks.into_iter().flat_map(|(v, n)| std::iter::repeat_n(v, n)).collect()
}

/// First downward crossing of the classical bound by linear interpolation.
fn crossing(eps: &[f64], s: &[f64]) -> std::result::Result<f64, &'static str> {
    if s[0] < CLASSICAL_BOUND {
        return Err("S is already below 2 at the first grid point");
    }
    for i in 0..s.len() - 1 {
        if s[i] >= CLASSICAL_BOUND && s[i + 1] < CLASSICAL_BOUND {
            let t = (s[i] - CLASSICAL_BOUND) / (s[i] - s[i + 1]);
            return Ok(eps[i] + t * (eps[i + 1] - eps[i]));
        }
    }
    Err("S stays at or above 2 over the whole grid")
}

/// Noise rate at which a single `S(ε)` curve reaches 2.
pub fn crit_from_curve(label: &str, eps: &[f64], s: &[f64], stderr: &[f64]) -> CurveCrit {
    let mut out = CurveCrit {
        label: label.to_string(),
        value: None,
        interval: None,
        smoothed: false,
        flagged: false,
        note: None,
    };
    if eps.is_empty() {
        out.note = Some("empty sweep".into());
        return out;
    }
    let tol = 3.0 * stderr.iter().copied().fold(0.0, f64::max) + 1e-9;
    let rises: Vec<f64> = s.windows(2).map(|w| w[1] - w[0]).collect();
    let (s_used, lo, hi) = if rises.iter().any(|&d| d > 0.0) {
        out.smoothed = true;
        out.flagged = rises.iter().any(|&d| d > tol);
        if out.flagged {
            out.note = Some("S increases beyond noise; crossing taken on the smoothed curve".into());
        }
        let lo: Vec<f64> = s.iter().zip(stderr).map(|(v, e)| v - e).collect();
        let hi: Vec<f64> = s.iter().zip(stderr).map(|(v, e)| v + e).collect();
        (non_increasing_fit(s), non_increasing_fit(&lo), non_increasing_fit(&hi))
    } else {
        let lo = s.iter().zip(stderr).map(|(v, e)| v - e).collect();
        let hi = s.iter().zip(stderr).map(|(v, e)| v + e).collect();
        (s.to_vec(), lo, hi)
    };
    match crossing(eps, &s_used) {
        Ok(v) => out.value = Some(v),
        Err(why) => {
            out.note.get_or_insert_with(|| why.to_string());
        }
    }
    if let (Ok(a), Ok(b)) = (crossing(eps, &lo), crossing(eps, &hi)) {
        out.interval = Some((a.min(b), a.max(b)));
    }
    out
}

/// Per-pair crossings of `S = 2` and the earliest one.
pub fn epsilon_crit(sweep: &SweepResult) -> CritReport {
    let eps: Vec<f64> = sweep.points.iter().map(|p| p.epsilon).collect();
    let per_pair: Vec<CurveCrit> = sweep
        .pair_labels()
        .iter()
        .enumerate()
        .map(|(i, label)| {
            let s: Vec<f64> = sweep.points.iter().map(|p| p.pairs[i].s).collect();
            let se: Vec<f64> = sweep.points.iter().map(|p| p.pairs[i].s_stderr).collect();
            crit_from_curve(label, &eps, &s, &se)
        })
        .collect();
    let value = per_pair.iter().filter_map(|c| c.value).reduce(f64::min);
    CritReport { value, per_pair }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn synthetic_curve_root() {
        let eps: Vec<f64> = (0..=100).map(|i| i as f64 * 0.002).collect();
        let s: Vec<f64> = eps.iter().map(|e| 2.0 * 2f64.sqrt() * (1.0 - e).powi(3)).collect();
        let se = vec![0.0; eps.len()];
        let c = crit_from_curve("p", &eps, &s, &se);
        let exact = 1.0 - (1.0 / 2f64.sqrt()).powf(1.0 / 3.0);
        assert!((c.value.unwrap() - exact).abs() < 0.002);
        assert!(!c.smoothed);
        assert_eq!(c.interval, Some((c.value.unwrap(), c.value.unwrap())));
    }

    #[test]
    fn no_crossing_is_absent() {
        let c = crit_from_curve("p", &[0.0, 0.1], &[2.8, 2.5], &[0.0, 0.0]);
        assert!(c.value.is_none());
        assert!(c.note.is_some());
    }

    #[test]
    fn non_monotone_input_is_smoothed_and_flagged() {
        let eps = [0.0, 0.01, 0.02, 0.03];
        let s = [2.6, 2.1, 2.3, 1.5];
        let c = crit_from_curve("p", &eps, &s, &[0.01; 4]);
        assert!(c.smoothed && c.flagged);
        // Smoothed: 2.6, 2.2, 2.2, 1.5 → crossing inside the last interval.
        let v = c.value.unwrap();
        assert!(v > 0.02 && v < 0.03);
    }

    #[test]
    fn pava_fit() {
        assert_eq!(non_increasing_fit(&[3.0, 1.0, 2.0, 0.0]), vec![3.0, 1.5, 1.5, 0.0]);
        assert_eq!(non_increasing_fit(&[1.0, 2.0, 3.0]), vec![2.0, 2.0, 2.0]);
    }

    #[test]
    fn grid_validation() {
        assert!(check_grid(&[]).is_err());
        assert!(check_grid(&[0.0, 0.0]).is_err());
        assert!(check_grid(&[0.0, 2.0]).is_err());
        assert!(check_grid(&[0.0, 0.01]).is_ok());
    }
}
