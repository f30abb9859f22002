//! `momentnet`: experiments, dataset tooling and diagnostics for moment-based
//! point-cloud classification.
//!
//! Every subcommand prints a JSON summary on stdout. On failure it prints a
//! JSON error object on stderr and exits with status 1.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use momentnet::dataio::Split;

use crate::config::ExperimentConfig;
use crate::error::CliResult;
use crate::output::parse_grid;

#[derive(Debug, Parser)]
#[command(name = "momentnet", version, about = "Moment-based point-cloud classification experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Args)]
struct Common {
    /// JSON experiment configuration; omitted fields take their defaults.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Master seed, overriding the configuration's.
    #[arg(long)]
    seed: Option<u64>,
    /// Output directory (default: `out`).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Fit x² on [0, 1] with narrow ReLU networks of increasing depth.
    ToyX2 {
        #[command(flatten)]
        common: Common,
        /// Inclusive depth range `first:last`.
        #[arg(long)]
        depths: Option<String>,
        /// Initialisations per depth.
        #[arg(long)]
        runs: Option<usize>,
    },
    /// Separate two spirals with one hidden layer, with or without quadratic inputs.
    ToySpiral {
        #[command(flatten)]
        common: Common,
        /// Feed (x, y) only instead of (x, y, x², y², xy).
        #[arg(long)]
        no_lift: bool,
        /// Hidden ReLU units.
        #[arg(long)]
        hidden: Option<usize>,
    },
    /// Centroid, second-moment matrix and principal directions of a cloud file.
    Moments {
        /// `.mpc` (binary) or `.xyz`/`.txt` (text) cloud.
        cloud: PathBuf,
        /// Also write `moments.json` into this directory.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Generate the synthetic shape benchmark and write it to disk.
    BuildDataset {
        #[command(flatten)]
        common: Common,
    },
    /// Train a classifier; writes checkpoint, config, metrics and curves.
    Train {
        #[command(flatten)]
        common: Common,
        /// Dataset directory from `build-dataset` (default: regenerate from the config).
        #[arg(long)]
        data: Option<PathBuf>,
        /// Ablation: raw coordinates instead of the polynomial lift.
        #[arg(long)]
        no_lift: bool,
    },
    /// Evaluate a trained model directory, or a fresh model when none is given.
    Eval {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Evaluate the training split instead of the test split.
        #[arg(long)]
        train_split: bool,
    },
    /// Accuracy under point dropout and rotation about the y axis.
    Sweep {
        #[command(flatten)]
        common: Common,
        #[arg(long)]
        model: Option<PathBuf>,
        #[arg(long)]
        data: Option<PathBuf>,
        /// Dropout ratios `start:stop:step`, e.g. `0:0.875:0.125`.
        #[arg(long)]
        dropout: Option<String>,
        /// Angles in degrees `start:stop:step`, e.g. `0:360:30`.
        #[arg(long)]
        yangle: Option<String>,
    },
}

fn resolve(common: &Common, name: &str) -> CliResult<ExperimentConfig> {
    ExperimentConfig::resolve(common.config.as_deref(), name, common.seed, common.out.clone())
}

fn run(cli: Cli) -> CliResult<serde_json::Value> {
    match cli.command {
        Command::ToyX2 { common, depths, runs } => {
            let mut cfg = resolve(&common, "toy-x2")?;
            if let Some(spec) = depths {
                cfg.toy_x2.depths = parse_depths(&spec)?;
            }
            if let Some(r) = runs {
                cfg.toy_x2.runs = r;
            }
            commands::toy_x2_cmd(&cfg)
        }
        Command::ToySpiral { common, no_lift, hidden } => {
            let mut cfg = resolve(&common, "toy-spiral")?;
            if no_lift {
                cfg.spiral.lift = false;
            }
            if let Some(h) = hidden {
                cfg.spiral.hidden = h;
            }
            commands::toy_spiral_cmd(&cfg)
        }
        Command::Moments { cloud, out } => commands::moments_cmd(&cloud, out.as_deref()),
        Command::BuildDataset { common } => commands::build_dataset_cmd(&resolve(&common, "build-dataset")?),
        Command::Train { common, data, no_lift } => {
            let mut cfg = resolve(&common, "train")?;
            cfg.data = data.or(cfg.data);
            commands::train_cmd(&cfg, no_lift)
        }
        Command::Eval { common, model, data, train_split } => {
            let mut cfg = resolve(&common, "eval")?;
            cfg.data = data.or(cfg.data);
            let split = if train_split { Split::Train } else { Split::Test };
            commands::eval_cmd(&cfg, model.as_deref(), split)
        }
        Command::Sweep { common, model, data, dropout, yangle } => {
            let mut cfg = resolve(&common, "sweep")?;
            cfg.data = data.or(cfg.data);
            let (mut dropout, mut yangle) = (
                dropout.map(|s| parse_grid("--dropout", &s)).transpose()?,
                yangle.map(|s| parse_grid("--yangle", &s)).transpose()?,
            );
            if dropout.is_none() && yangle.is_none() {
                dropout = Some(parse_grid("--dropout", "0:0.875:0.125")?);
                yangle = Some(parse_grid("--yangle", "0:360:30")?);
            }
            commands::sweep_cmd(&cfg, model.as_deref(), dropout, yangle)
        }
    }
}

/// `first:last`, inclusive, or a single depth.
fn parse_depths(spec: &str) -> CliResult<Vec<usize>> {
    let bad = || crate::error::CliError::usage("--depths", format!("expected first:last with 1 <= first <= last, got `{spec}`"));
    let num = |t: &str| t.trim().parse::<usize>().map_err(|_| bad());
    let (first, last) = match spec.split_once(':') {
        Some((a, b)) => (num(a)?, num(b)?),
        None => (num(spec)?, num(spec)?),
    };
    if first == 0 || first > last {
        return Err(bad());
    }
    Ok((first..=last).collect())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if !e.use_stderr() => {
            // --help and --version
            let _ = e.print();
            return ExitCode::SUCCESS;
        }
        Err(e) => {
            let err = crate::error::CliError::usage("arguments", e.render().to_string().trim());
            eprintln!("{}", err.to_json());
            return ExitCode::FAILURE;
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{}", serde_json::to_string_pretty(&summary).expect("JSON values serialize"));
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::FAILURE
        }
    }
}
