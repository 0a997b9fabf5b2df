//! Config-driven experiments with deterministic, machine-readable output.
//!
//! An [`ExperimentConfig`] is a TOML document; any field can be overridden
//! with a dotted `key=value` assignment (see [`apply_override`]). Running a
//! config yields a [`ResultRecord`], which [`emit`] writes as JSON and/or
//! CSV. With the same config and seed, the emitted files are byte-identical.

mod config;
mod emit;
mod run;

pub use config::{
    apply_override, Estimator, ExperimentConfig, ExperimentKind, FixtureConfig, FixtureState,
    NoiseConfig, OutputConfig, ProtocolConfig, ProtocolName, SweepConfig,
};
pub use emit::{emit, read_sweep_csv, write_csv, write_json, SWEEP_CSV_HEADER};
pub use run::{
    run, ChshReport, PairReport, Provenance, ProtocolReport, ResultRecord, Results, SensitivityEntry,
    SweepReport, TomographyReport,
};
