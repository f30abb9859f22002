//! One function per subcommand. Each writes its artifacts under the output
//! directory and returns the JSON summary printed on stdout.

use std::path::Path;

use momentnet::dataio::{build_benchmark, load_dataset, materialize, read_cloud, DatasetManifest, Split, MANIFEST_FILE};
use momentnet::experiments::{toy_spiral, toy_x2};
use momentnet::geometry::{principal_directions, PointCloud};
use momentnet::model::{evaluate, robustness_sweep, train, MomentNet, PolynomialOrder, Sweep};
use momentnet::nn::{load_checkpoint, save_checkpoint};
use momentnet::Dataset;
use serde_json::{json, Value};

use crate::config::ExperimentConfig;
use crate::error::{CliError, CliResult};
use crate::output::{ensure_dir, round_sig, wrap_degrees, write_csv, write_json, MetricsRecord};

pub const CHECKPOINT_FILE: &str = "checkpoint.bin";
pub const CONFIG_FILE: &str = "config.json";
pub const METRICS_FILE: &str = "metrics.json";
pub const CURVES_FILE: &str = "curves.csv";

/// Significant digits in `moments` output.
const MOMENT_DIGITS: usize = 12;

pub fn toy_x2_cmd(cfg: &ExperimentConfig) -> CliResult<Value> {
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    let report = toy_x2(&cfg.toy_x2)?;
    write_csv(
        &out.join("toy_x2.csv"),
        &["depth", "run", "linf", "steps"],
        report.runs.iter().map(|r| vec![r.depth as f64, r.run as f64, r.linf, r.steps as f64]),
    )?;
    let summary = json!({ "seed": cfg.seed, "runs_per_depth": cfg.toy_x2.runs, "depths": report.summary });
    write_json(&out.join("toy_x2_summary.json"), &summary)?;
    Ok(summary)
}

pub fn toy_spiral_cmd(cfg: &ExperimentConfig) -> CliResult<Value> {
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    let report = toy_spiral(&cfg.spiral)?;
    write_csv(&out.join("spiral_grid.csv"), &["x", "y", "p"], report.grid.iter().map(|c| vec![c.x, c.y, c.p]))?;
    let summary = serde_json::to_value(&report)?;
    write_json(&out.join("spiral.json"), &summary)?;
    Ok(summary)
}

pub fn moments_cmd(path: &Path, out: Option<&Path>) -> CliResult<Value> {
    let cloud: PointCloud<f64> = read_cloud(path).map_err(|e| match e {
        momentnet::Error::Io(io) => CliError::io(path, io),
        other => CliError::Core(other),
    })?;
    let m = principal_directions(&cloud);
    let r = |v: f64| round_sig(v, MOMENT_DIGITS);
    let summary = json!({
        "source": path.display().to_string(),
        "points": cloud.len(),
        "centroid": m.centroid.to_array().map(r),
        "sigma": m.sigma.0.map(|row| row.map(r)),
        "eigenvalues": m.eigenvalues.map(r),
        "directions": m.directions.map(|d| d.to_array().map(r)),
        "degenerate": m.degenerate,
    });
    if let Some(dir) = out {
        ensure_dir(dir)?;
        write_json(&dir.join("moments.json"), &summary)?;
    }
    Ok(summary)
}

pub fn build_dataset_cmd(cfg: &ExperimentConfig) -> CliResult<Value> {
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    let manifest = materialize(&build_benchmark(&cfg.dataset)?, &out)?;
    Ok(json!({
        "manifest": out.join(MANIFEST_FILE).display().to_string(),
        "classes": manifest.classes,
        "train": manifest.split_entries(Split::Train).count(),
        "test": manifest.split_entries(Split::Test).count(),
    }))
}

/// The configured dataset: a materialized directory when given, otherwise
/// the benchmark regenerated from its spec.
fn dataset(cfg: &ExperimentConfig) -> CliResult<Dataset> {
    Ok(match &cfg.data {
        Some(dir) => load_dataset(&DatasetManifest::load(&dir.join(MANIFEST_FILE))?, dir)?,
        None => load_dataset(&build_benchmark(&cfg.dataset)?, Path::new("."))?,
    })
}

/// Aligns the model configuration with the data it will see.
fn fit_model_config(cfg: &mut ExperimentConfig, data: &Dataset) {
    cfg.model.num_classes = data.num_classes();
    if let Some(s) = data.train.first().or(data.test.first()) {
        cfg.model.num_points = s.cloud.len();
    }
}

pub fn train_cmd(cfg: &ExperimentConfig, no_lift: bool) -> CliResult<Value> {
    let mut cfg = cfg.clone();
    if no_lift {
        cfg.model.order = PolynomialOrder::None;
    }
    let data = dataset(&cfg)?;
    fit_model_config(&mut cfg, &data);
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    write_json(&out.join(CONFIG_FILE), &cfg)?;

    let mut model = MomentNet::<f64>::new(cfg.model.clone())?;
    let report = train(&mut model, &data, &cfg.train, |r| {
        let test = r.test.as_ref().map_or(String::new(), |m| format!(" test {:.4}", m.overall));
        eprintln!("epoch {} lr {:.2e} loss {:.4} train {:.4}{test}", r.epoch, r.lr, r.loss, r.train_accuracy);
    })?;
    save_checkpoint(out.join(CHECKPOINT_FILE), model.params())?;

    let records: Vec<MetricsRecord> = report
        .history
        .iter()
        .filter_map(|r| r.test.as_ref().map(|m| MetricsRecord::new(Some(r.epoch), Split::Test.name(), m)))
        .collect();
    write_json(&out.join(METRICS_FILE), &records)?;
    write_csv(
        &out.join(CURVES_FILE),
        &["epoch", "loss", "acc"],
        report.history.iter().map(|r| vec![r.epoch as f64, r.loss, r.train_accuracy]),
    )?;
    Ok(json!({ "steps": report.steps, "final": records.last() }))
}

/// A trained model from `dir` (checkpoint plus the configuration it was
/// trained with), or a freshly initialised one.
fn model_and_config(cfg: &ExperimentConfig, model_dir: Option<&Path>) -> CliResult<(MomentNet<f64>, ExperimentConfig)> {
    match model_dir {
        Some(dir) => {
            let mut trained = ExperimentConfig::load(&dir.join(CONFIG_FILE))?;
            // where artifacts go and which data to use come from this
            // invocation, the network from the checkpoint
            trained.out = cfg.out.clone();
            if cfg.data.is_some() {
                trained.data = cfg.data.clone();
            }
            let params = load_checkpoint(dir.join(CHECKPOINT_FILE))?;
            Ok((MomentNet::from_params(trained.model.clone(), params)?, trained))
        }
        None => {
            let mut fresh = cfg.clone();
            let data = dataset(&fresh)?;
            fit_model_config(&mut fresh, &data);
            Ok((MomentNet::new(fresh.model.clone())?, fresh))
        }
    }
}

pub fn eval_cmd(cfg: &ExperimentConfig, model_dir: Option<&Path>, split: Split) -> CliResult<Value> {
    let (model, cfg) = model_and_config(cfg, model_dir)?;
    let data = dataset(&cfg)?;
    let m = evaluate(&model, data.split(split))?;
    let record = MetricsRecord::new(None, split.name(), &m);
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    write_json(&out.join(METRICS_FILE), &[&record])?;
    Ok(serde_json::to_value(&record)?)
}

pub fn sweep_cmd(
    cfg: &ExperimentConfig,
    model_dir: Option<&Path>,
    dropout: Option<Vec<f64>>,
    yangle: Option<Vec<f64>>,
) -> CliResult<Value> {
    let (model, cfg) = model_and_config(cfg, model_dir)?;
    let data = dataset(&cfg)?;
    let out = cfg.out_dir();
    ensure_dir(&out)?;
    let mut curves = serde_json::Map::new();
    let sweeps = [
        ("dropout", "ratio", dropout.map(Sweep::DropoutRatios)),
        ("yangle", "degrees", yangle.map(|v| Sweep::YAngles(wrap_degrees(v)))),
    ];
    for (name, column, sweep) in sweeps {
        let Some(sweep) = sweep else { continue };
        let points = robustness_sweep(&model, &data.test, &sweep, cfg.seed)?;
        write_csv(
            &out.join(format!("sweep_{name}.csv")),
            &[column, "overall", "mean_class"],
            points.iter().map(|p| vec![p.value, p.metrics.overall, p.metrics.mean_class]),
        )?;
        let rows: Vec<Value> = points
            .iter()
            .map(|p| json!({ "value": p.value, "overall": p.metrics.overall, "mean_class": p.metrics.mean_class }))
            .collect();
        curves.insert(name.to_string(), Value::Array(rows));
    }
    let summary = Value::Object(curves);
    write_json(&out.join("sweep.json"), &summary)?;
    Ok(summary)
}

