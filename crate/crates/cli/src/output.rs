//! Artifact writers and the small parsers behind grid flags.

use std::fs;
use std::path::Path;

use momentnet::model::Metrics;
use serde::{Deserialize, Serialize};

use crate::error::{CliError, CliResult};

/// One evaluation, as written to `metrics.json`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MetricsRecord {
    /// 1-based training epoch; `None` for a standalone evaluation.
    pub epoch: Option<usize>,
    pub split: String,
    pub overall: f64,
    pub mean_class: f64,
    pub per_class: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub loss: Option<f64>,
}

impl MetricsRecord {
    pub fn new(epoch: Option<usize>, split: &str, m: &Metrics) -> Self {
        MetricsRecord {
            epoch,
            split: split.to_string(),
            overall: m.overall,
            mean_class: m.mean_class,
            per_class: m.per_class.clone(),
            loss: m.loss,
        }
    }
}

/// `start:stop:step`, both ends inclusive (up to rounding of the step).
pub fn parse_grid(flag: &str, spec: &str) -> CliResult<Vec<f64>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let [a, b, s] = parts[..] else {
        return Err(CliError::usage(flag, format!("expected start:stop:step, got `{spec}`")));
    };
    let num = |t: &str| t.trim().parse::<f64>().map_err(|_| CliError::usage(flag, format!("`{t}` is not a number")));
    let (start, stop, step) = (num(a)?, num(b)?, num(s)?);
    if !(step > 0.0 && step.is_finite()) || !start.is_finite() || !stop.is_finite() || stop < start {
        return Err(CliError::usage(flag, format!("need finite start <= stop and step > 0, got `{spec}`")));
    }
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}

/// Angles reduced to `[0, 360)` with duplicates (such as 0 and 360)
/// dropped, first occurrence kept.
pub fn wrap_degrees(values: Vec<f64>) -> Vec<f64> {
    let mut out: Vec<f64> = Vec::with_capacity(values.len());
    for v in values {
        let w = v.rem_euclid(360.0);
        if !out.iter().any(|&o| (o - w).abs() < 1e-9) {
            out.push(w);
        }
    }
    out
}

/// `v` rounded to `digits` significant decimal digits.
pub fn round_sig(v: f64, digits: usize) -> f64 {
    if v == 0.0 || !v.is_finite() {
        return v;
    }
    format!("{:.*e}", digits.saturating_sub(1), v).parse().unwrap_or(v)
}

pub fn ensure_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

pub fn write_json<S: Serialize>(path: &Path, value: &S) -> CliResult<()> {
    let text = serde_json::to_string_pretty(value)?;
    fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))
}

/// Numeric CSV with a header row; values are written with Rust's shortest
/// round-trip formatting.
pub fn write_csv(path: &Path, header: &[&str], rows: impl IntoIterator<Item = Vec<f64>>) -> CliResult<()> {
    let mut text = header.join(",");
    text.push('\n');
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        text.push_str(&cells.join(","));
        text.push('\n');
    }
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}
