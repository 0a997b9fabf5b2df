use std::fs;
use std::path::{Path, PathBuf};

use super::config::OutputConfig;
use super::run::{ResultRecord, Results};
use crate::analysis::{PairPoint, SweepPoint, SweepResult};
use crate::error::{Error, Result};

/// Column order of sweep CSV files. `epsilon_crit` repeats the pair's
/// crossing on every row (empty when the pair never crosses).
pub const SWEEP_CSV_HEADER: [&str; 8] =
    ["epsilon", "pair", "F", "F_stderr", "S", "S_stderr", "epsilon_crit", "seed"];

const METRIC_CSV_HEADER: [&str; 6] = ["metric", "pair", "value", "stderr", "estimator", "seed"];

fn io_err(path: &Path, e: impl std::fmt::Display) -> Error {
    Error::File {
        path: path.display().to_string(),
        message: e.to_string(),
    }
}

fn write_file(path: &Path, bytes: &[u8]) -> Result<()> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        fs::create_dir_all(dir).map_err(|e| io_err(dir, e))?;
    }
    fs::write(path, bytes).map_err(|e| io_err(path, e))
}

pub fn write_json(record: &ResultRecord, path: &Path) -> Result<()> {
    let mut text = serde_json::to_string_pretty(record).map_err(|e| io_err(path, e))?;
    text.push('\n');
    write_file(path, text.as_bytes())
}

fn opt(x: Option<f64>) -> String {
    x.map(|v| v.to_string()).unwrap_or_default()
}

fn csv_bytes(header: &[&str], rows: Vec<Vec<String>>) -> Result<Vec<u8>> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for r in rows {
        w.write_record(&r)?;
    }
    w.into_inner().map_err(|e| Error::Io(e.into_error()))
}

fn sweep_rows(sweep: &SweepResult) -> Vec<Vec<String>> {
    let crit_of = |label: &str| {
        sweep
            .epsilon_crit
            .per_pair
            .iter()
            .find(|c| c.label == label)
            .and_then(|c| c.value)
    };
    let mut rows = Vec::new();
    for p in &sweep.points {
        for q in &p.pairs {
            rows.push(vec![
                p.epsilon.to_string(),
                q.label.clone(),
                q.fidelity.to_string(),
                q.fidelity_stderr.to_string(),
                q.s.to_string(),
                q.s_stderr.to_string(),
                opt(crit_of(&q.label)),
                sweep.seed.to_string(),
            ]);
        }
    }
    rows
}

fn metric_rows(record: &ResultRecord) -> Vec<Vec<String>> {
    let seed = record.provenance.seed.to_string();
    let mut rows = Vec::new();
    let mut push = |metric: &str, pair: &str, value: f64, stderr: Option<f64>, est: &str| {
        rows.push(vec![
            metric.to_string(),
            pair.to_string(),
            value.to_string(),
            opt(stderr),
            est.to_string(),
            seed.clone(),
        ]);
    };
    match &record.results {
        Results::Protocol(r) => {
            push("acceptance", "", r.acceptance, None, r.estimator);
            push("fidelity", "", r.fidelity, r.fidelity_stderr, r.estimator);
            for p in &r.pairs {
                push("fidelity", &p.label, p.fidelity, p.fidelity_stderr, p.estimator);
                if let Some(c) = p.concurrence {
                    push("concurrence", &p.label, c, None, p.estimator);
                }
                push("S", &p.label, p.s, p.s_stderr, p.estimator);
            }
            if let Some(c) = &r.correlation {
                let n = c.values.len();
                for i in 0..n {
                    for j in 0..n {
                        let label = format!("{}-{}", r.output_roles[i], r.output_roles[j]);
                        push("ZZ", &label, c.values[i][j], c.stderr.as_ref().map(|s| s[i][j]), r.estimator);
                    }
                }
            }
        }
        Results::Sweep(_) => unreachable!("sweeps use the sweep layout"),
        Results::Tomography(r) => {
            for e in &r.entries {
                push("fidelity", &e.label, e.fidelity, None, r.estimator);
                if let Some(d) = e.trace_distance {
                    push("trace_distance", &e.label, d, None, r.estimator);
                }
            }
        }
        Results::Chsh(r) => {
            for e in &r.entries {
                push("S", &e.label, e.s, e.stderr, r.estimator);
            }
        }
    }
    rows
}

/// Writes the record as CSV. Sweeps use [`SWEEP_CSV_HEADER`] (a sweep with
/// no points yields a header-only file); everything else uses one row per
/// metric.
pub fn write_csv(record: &ResultRecord, path: &Path) -> Result<()> {
    let bytes = match &record.results {
        Results::Sweep(s) => csv_bytes(&SWEEP_CSV_HEADER, sweep_rows(&s.sweep))?,
        _ => csv_bytes(&METRIC_CSV_HEADER, metric_rows(record))?,
    };
    write_file(path, &bytes)
}

/// Writes whichever outputs the config names; returns the written paths.
pub fn emit(record: &ResultRecord, output: &OutputConfig) -> Result<Vec<PathBuf>> {
    let mut written = Vec::new();
    if let Some(p) = &output.json {
        write_json(record, p)?;
        written.push(p.clone());
    }
    if let Some(p) = &output.csv {
        write_csv(record, p)?;
        written.push(p.clone());
    }
    Ok(written)
}

/// Reads a sweep CSV back. The crossing is recomputed from the points, so it
/// matches the one written whenever the file is unmodified.
pub fn read_sweep_csv(path: &Path) -> Result<SweepResult> {
    let text = fs::read_to_string(path).map_err(|e| io_err(path, e))?;
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    let header = rdr.headers().map_err(|e| io_err(path, e))?.clone();
    if header.iter().ne(SWEEP_CSV_HEADER.iter().copied()) {
        return Err(io_err(path, "not a sweep CSV (unexpected header)"));
    }
    let mut points: Vec<SweepPoint> = Vec::new();
    let mut seed = 0;
    for (line, rec) in rdr.records().enumerate() {
        let rec = rec.map_err(|e| io_err(path, e))?;
        let num = |i: usize| -> Result<f64> {
            rec[i]
                .parse()
                .map_err(|_| io_err(path, format!("row {}: bad {} value {:?}", line + 1, SWEEP_CSV_HEADER[i], &rec[i])))
        };
        let epsilon = num(0)?;
        seed = rec[7].parse().map_err(|_| io_err(path, format!("row {}: bad seed", line + 1)))?;
        let pair = PairPoint {
            label: rec[1].to_string(),
            fidelity: num(2)?,
            fidelity_stderr: num(3)?,
            s: num(4)?,
            s_stderr: num(5)?,
        };
        match points.last_mut() {
            Some(p) if p.epsilon == epsilon => p.pairs.push(pair),
            _ => points.push(SweepPoint {
                epsilon,
                pairs: vec![pair],
            }),
        }
    }
    let estimator = if points.iter().flat_map(|p| &p.pairs).any(|q| q.s_stderr > 0.0) {
        "shot-sampled"
    } else {
        "exact"
    };
    Ok(SweepResult::from_points(
        String::new(),
        estimator.into(),
        false,
        seed,
        points,
    ))
}
