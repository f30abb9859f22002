//! The JSON experiment configuration and how command-line flags refine it.

use std::fs;
use std::path::{Path, PathBuf};

use momentnet::dataio::BenchmarkSpec;
use momentnet::experiments::{SpiralConfig, ToyX2Config};
use momentnet::model::{ModelConfig, TrainConfig};
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// Everything one invocation needs. Every field has a default, so `{}` is a
/// valid configuration.
///
/// The top-level `seed` is authoritative: it is copied into every nested
/// configuration before use, so one number replays a whole run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub name: String,
    pub seed: u64,
    /// Output directory; `--out` takes precedence.
    pub out: Option<PathBuf>,
    /// A materialized dataset directory (holding `manifest.json`). When
    /// absent, the benchmark described by `dataset` is generated in memory.
    pub data: Option<PathBuf>,
    pub dataset: BenchmarkSpec,
    pub model: ModelConfig,
    pub train: TrainConfig,
    pub toy_x2: ToyX2Config,
    pub spiral: SpiralConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        ExperimentConfig {
            name: String::new(),
            seed: 0,
            out: None,
            data: None,
            dataset: BenchmarkSpec::default(),
            model: ModelConfig::default(),
            train: TrainConfig::default(),
            toy_x2: ToyX2Config::default(),
            spiral: SpiralConfig::default(),
        }
    }
}

impl ExperimentConfig {
    pub fn load(path: &Path) -> CliResult<Self> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        serde_json::from_str(&text).map_err(|e| CliError::Config { path: path.to_path_buf(), source: e })
    }

    /// Reads `path` if given, otherwise starts from defaults, then applies
    /// the shared flags and propagates the seed.
    pub fn resolve(path: Option<&Path>, name: &str, seed: Option<u64>, out: Option<PathBuf>) -> CliResult<Self> {
        let mut cfg = match path {
            Some(p) => Self::load(p)?,
            None => Self::default(),
        };
        if cfg.name.is_empty() {
            cfg.name = name.to_string();
        }
        if let Some(s) = seed {
            cfg.seed = s;
        }
        if out.is_some() {
            cfg.out = out;
        }
        cfg.dataset.seed = cfg.seed;
        cfg.model.seed = cfg.seed;
        cfg.train.seed = cfg.seed;
        cfg.toy_x2.seed = cfg.seed;
        cfg.spiral.seed = cfg.seed;
        Ok(cfg)
    }

    pub fn out_dir(&self) -> PathBuf {
        self.out.clone().unwrap_or_else(|| PathBuf::from("out"))
    }
}
