use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use mqnc::error::{Error, Result};
use mqnc::experiment::{emit, run, ExperimentConfig, ExperimentKind};
use mqnc::protocols::DeviceTopology;

#[derive(Parser)]
#[command(name = "mqnc", version, about = "Entanglement-distribution protocols under depolarizing noise")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run one protocol and report fidelities, CHSH values and correlations.
    RunProtocol(RunArgs),
    /// Sweep the depolarizing rate and locate the CHSH crossing.
    RunSweep(RunArgs),
    /// Reconstruct pair states by Pauli tomography.
    RunTomography(RunArgs),
    /// Evaluate the CHSH parameter of pairs or fixture states.
    RunChsh(RunArgs),
    /// Parse and validate a config without running it.
    ValidateConfig {
        config: PathBuf,
        /// Dotted override, e.g. `noise.epsilon=0.01`; repeatable.
        #[arg(long = "set", value_name = "KEY=VALUE")]
        overrides: Vec<String>,
    },
    /// Print the built-in device topologies (or a topology file).
    ListTopologies {
        /// Parse and print this topology file instead.
        #[arg(long)]
        file: Option<PathBuf>,
    },
}

#[derive(Args)]
struct RunArgs {
    /// TOML experiment config; omitted fields take their defaults.
    #[arg(long, short)]
    config: Option<PathBuf>,
    /// Dotted override, e.g. `noise.epsilon=0.01`; repeatable.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    /// Write the JSON record here.
    #[arg(long)]
    out_json: Option<PathBuf>,
    /// Write the CSV table here.
    #[arg(long)]
    out_csv: Option<PathBuf>,
}

fn kind_name(kind: ExperimentKind) -> &'static str {
    match kind {
        ExperimentKind::Protocol => "protocol",
        ExperimentKind::Sweep => "sweep",
        ExperimentKind::Tomography => "tomography",
        ExperimentKind::Chsh => "chsh",
    }
}

fn read(path: &PathBuf) -> Result<String> {
    std::fs::read_to_string(path).map_err(|e| Error::File {
        path: path.display().to_string(),
        message: e.to_string(),
    })
}

fn load(kind: ExperimentKind, args: RunArgs) -> Result<ExperimentConfig> {
    let text = match &args.config {
        Some(p) => read(p)?,
        None => String::new(),
    };
    let mut overrides = vec![format!("kind=\"{}\"", kind_name(kind))];
    overrides.extend(args.overrides);
    if let Some(seed) = args.seed {
        overrides.push(format!("seed={seed}"));
    }
    let mut config = ExperimentConfig::from_toml_with(&text, &overrides)?;
    if args.out_json.is_some() {
        config.output.json = args.out_json;
    }
    if args.out_csv.is_some() {
        config.output.csv = args.out_csv;
    }
    Ok(config)
}

fn run_kind(kind: ExperimentKind, args: RunArgs) -> Result<()> {
    let config = load(kind, args)?;
    let record = run(&config)?;
    let written = emit(&record, &config.output)?;
    if written.is_empty() {
        // No output files requested: the record goes to stdout.
        let text = serde_json::to_string_pretty(&record)?;
        println!("{text}");
    } else {
        for p in written {
            eprintln!("wrote {}", p.display());
        }
    }
    Ok(())
}

fn main_inner(cli: Cli) -> Result<()> {
    match cli.command {
        Command::RunProtocol(a) => run_kind(ExperimentKind::Protocol, a),
        Command::RunSweep(a) => run_kind(ExperimentKind::Sweep, a),
        Command::RunTomography(a) => run_kind(ExperimentKind::Tomography, a),
        Command::RunChsh(a) => run_kind(ExperimentKind::Chsh, a),
        Command::ValidateConfig { config, overrides } => {
            let cfg = ExperimentConfig::from_toml_with(&read(&config)?, &overrides)?;
            cfg.validate()?;
            println!("{}: ok ({} experiment)", config.display(), kind_name(cfg.kind));
            Ok(())
        }
        Command::ListTopologies { file } => {
            let topologies = match file {
                Some(p) => vec![DeviceTopology::load(&p)?],
                None => DeviceTopology::presets(),
            };
            for t in topologies {
                println!("{t}");
            }
            Ok(())
        }
    }
}

fn main() -> ExitCode {
    match main_inner(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(match e {
                Error::Config { .. } | Error::Embedding { .. } | Error::TopologyFile(_) => 2,
                _ => 1,
            })
        }
    }
}

