//! Dataset manifests, the synthetic benchmark builder, and loading.

use std::collections::HashSet;
use std::fs;
use std::path::{Path, PathBuf};

use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use super::cloud_io::{read_cloud, write_cloud};
use super::synthetic::{generate_synthetic, ShapeKind, SyntheticShapeRecipe};
use crate::error::{Error, Result};
use crate::geometry::PointCloud;
use crate::rng;
use crate::scalar::Real;

pub const MANIFEST_FILE: &str = "manifest.json";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Split {
    Train,
    Test,
}

impl Split {
    pub fn name(self) -> &'static str {
        match self {
            Split::Train => "train",
            Split::Test => "test",
        }
    }
}

/// One sample: either a cloud file (relative to the manifest) or a recipe.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub path: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub recipe: Option<SyntheticShapeRecipe>,
    pub label: usize,
    pub split: Split,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DatasetManifest {
    pub classes: Vec<String>,
    pub seed: u64,
    pub entries: Vec<ManifestEntry>,
}

impl DatasetManifest {
    /// Unique ids, labels inside the class table, exactly one source each.
    pub fn validate(&self) -> Result<()> {
        let mut seen = HashSet::new();
        for e in &self.entries {
            if !seen.insert(e.id.as_str()) {
                return Err(Error::Format(format!("duplicate sample id `{}`", e.id)));
            }
            if e.label >= self.classes.len() {
                return Err(Error::LabelOutOfRange { label: e.label, classes: self.classes.len() });
            }
            if e.path.is_some() == e.recipe.is_some() {
                return Err(Error::Format(format!("entry `{}` needs exactly one of path or recipe", e.id)));
            }
        }
        Ok(())
    }

    pub fn split_entries(&self, split: Split) -> impl Iterator<Item = &ManifestEntry> {
        self.entries.iter().filter(move |e| e.split == split)
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let m: DatasetManifest = serde_json::from_str(text)?;
        m.validate()?;
        Ok(m)
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        fs::write(path, self.to_json()?)?;
        Ok(())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_json(&fs::read_to_string(path)?)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct BenchmarkSpec {
    pub classes: Vec<ShapeKind>,
    pub samples_per_class: usize,
    pub num_points: usize,
    pub noise_sigma: f64,
    pub train_fraction: f64,
    pub seed: u64,
}

impl Default for BenchmarkSpec {
    fn default() -> Self {
        BenchmarkSpec {
            classes: ShapeKind::ALL.to_vec(),
            samples_per_class: 100,
            num_points: 256,
            noise_sigma: 0.01,
            train_fraction: 0.8,
            seed: 0,
        }
    }
}

impl BenchmarkSpec {
    /// Train samples per class; the remainder of each class is test.
    pub fn train_per_class(&self) -> usize {
        (self.samples_per_class as f64 * self.train_fraction).round() as usize
    }
}

/// Stratified synthetic benchmark. Each class contributes
/// `round(samples · train_fraction)` train samples, chosen by a seeded
/// shuffle, and the rest as test samples.
pub fn build_benchmark(spec: &BenchmarkSpec) -> Result<DatasetManifest> {
    if spec.classes.len() < 2 {
        return Err(Error::config("classes", "need at least 2 classes"));
    }
    if spec.classes.iter().collect::<HashSet<_>>().len() != spec.classes.len() {
        return Err(Error::config("classes", "class list has duplicates"));
    }
    if !(spec.train_fraction > 0.0 && spec.train_fraction < 1.0) {
        return Err(Error::config("train_fraction", "must lie strictly between 0 and 1"));
    }
    let n_train = spec.train_per_class();
    if n_train == 0 || n_train >= spec.samples_per_class {
        return Err(Error::EmptySplit(format!(
            "{} samples per class cannot be split {}/{} with both sides non-empty",
            spec.samples_per_class,
            spec.train_fraction,
            1.0 - spec.train_fraction
        )));
    }

    let mut entries = Vec::with_capacity(spec.classes.len() * spec.samples_per_class);
    for (label, &kind) in spec.classes.iter().enumerate() {
        let mut order: Vec<usize> = (0..spec.samples_per_class).collect();
        order.shuffle(&mut rng::seeded(rng::derive_seed(spec.seed, 0x5_0000 + label as u64)));
        let mut is_train = vec![false; spec.samples_per_class];
        for &i in &order[..n_train] {
            is_train[i] = true;
        }
        for (i, train) in is_train.into_iter().enumerate() {
            let sample_seed = rng::derive_seed(spec.seed, ((label as u64) << 32) | i as u64);
            let recipe = SyntheticShapeRecipe::random(kind, sample_seed, spec.noise_sigma, spec.num_points);
            recipe.validate()?;
            entries.push(ManifestEntry {
                id: format!("{kind}_{i:04}"),
                path: None,
                recipe: Some(recipe),
                label,
                split: if train { Split::Train } else { Split::Test },
            });
        }
    }
    let manifest =
        DatasetManifest { classes: spec.classes.iter().map(|k| k.to_string()).collect(), seed: spec.seed, entries };
    manifest.validate()?;
    Ok(manifest)
}

/// Writes every recipe sample as `<dir>/clouds/<id>.mpc`, plus a manifest
/// pointing at those files as `<dir>/manifest.json`. Returns that manifest.
pub fn materialize(manifest: &DatasetManifest, dir: &Path) -> Result<DatasetManifest> {
    manifest.validate()?;
    fs::create_dir_all(dir.join("clouds"))?;
    let mut out = manifest.clone();
    for e in &mut out.entries {
        if let Some(recipe) = e.recipe.take() {
            let rel = format!("clouds/{}.mpc", e.id);
            let cloud: PointCloud<f64> = generate_synthetic(&recipe)?;
            write_cloud(&dir.join(&rel), &cloud)?;
            e.path = Some(rel);
        }
    }
    out.save(&dir.join(MANIFEST_FILE))?;
    Ok(out)
}

#[derive(Debug, Clone, PartialEq)]
pub struct Sample<T> {
    pub id: String,
    pub cloud: PointCloud<T>,
    pub label: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Dataset<T> {
    pub classes: Vec<String>,
    pub train: Vec<Sample<T>>,
    pub test: Vec<Sample<T>>,
}

impl<T: Real> Dataset<T> {
    pub fn num_classes(&self) -> usize {
        self.classes.len()
    }

    pub fn split(&self, split: Split) -> &[Sample<T>] {
        match split {
            Split::Train => &self.train,
            Split::Test => &self.test,
        }
    }
}

/// Materializes every entry in memory. Relative paths resolve against
/// `base_dir` (normally the manifest's directory).
pub fn load_dataset<T: Real>(manifest: &DatasetManifest, base_dir: &Path) -> Result<Dataset<T>> {
    manifest.validate()?;
    let mut ds = Dataset { classes: manifest.classes.clone(), train: Vec::new(), test: Vec::new() };
    for e in &manifest.entries {
        let cloud = match (&e.path, &e.recipe) {
            (Some(p), _) => {
                let p = PathBuf::from(p);
                read_cloud(&if p.is_absolute() { p } else { base_dir.join(p) })?
            }
            (None, Some(r)) => generate_synthetic(r)?,
            (None, None) => unreachable!("validated"),
        };
        let sample = Sample { id: e.id.clone(), cloud, label: e.label };
        match e.split {
            Split::Train => ds.train.push(sample),
            Split::Test => ds.test.push(sample),
        }
    }
    Ok(ds)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> BenchmarkSpec {
        BenchmarkSpec {
            classes: vec![ShapeKind::Sphere, ShapeKind::Cube, ShapeKind::Torus],
            samples_per_class: 10,
            num_points: 64,
            ..BenchmarkSpec::default()
        }
    }

    #[test]
    fn default_counts() {
        let m = build_benchmark(&BenchmarkSpec::default()).unwrap();
        assert_eq!(m.split_entries(Split::Train).count(), 640);
        assert_eq!(m.split_entries(Split::Test).count(), 160);
        for label in 0..8 {
            let train = m.split_entries(Split::Train).filter(|e| e.label == label).count();
            let test = m.split_entries(Split::Test).filter(|e| e.label == label).count();
            assert_eq!((train, test), (80, 20));
        }
    }

    #[test]
    fn deterministic_and_seed_sensitive() {
        let a = build_benchmark(&small()).unwrap();
        assert_eq!(a, build_benchmark(&small()).unwrap());
        let other = build_benchmark(&BenchmarkSpec { seed: 1, ..small() }).unwrap();
        assert_ne!(a, other);
    }

    #[test]
    fn rejects_unsplittable_specs() {
        assert!(matches!(
            build_benchmark(&BenchmarkSpec { samples_per_class: 1, ..small() }),
            Err(Error::EmptySplit(_))
        ));
        assert!(build_benchmark(&BenchmarkSpec { classes: vec![ShapeKind::Cube], ..small() }).is_err());
    }

    #[test]
    fn manifest_validation() {
        let mut m = build_benchmark(&small()).unwrap();
        m.entries[1].id = m.entries[0].id.clone();
        assert!(m.validate().is_err());
        let mut m = build_benchmark(&small()).unwrap();
        m.entries[0].label = 3;
        assert!(matches!(m.validate(), Err(Error::LabelOutOfRange { .. })));
        let mut m = build_benchmark(&small()).unwrap();
        m.entries[0].path = Some("x.mpc".into());
        assert!(m.validate().is_err());
    }

    #[test]
    fn json_round_trip_and_materialize() {
        let m = build_benchmark(&small()).unwrap();
        assert_eq!(DatasetManifest::from_json(&m.to_json().unwrap()).unwrap(), m);

        let dir = tempfile::tempdir().unwrap();
        let on_disk = materialize(&m, dir.path()).unwrap();
        assert!(on_disk.entries.iter().all(|e| e.path.is_some() && e.recipe.is_none()));
        let reloaded = DatasetManifest::load(&dir.path().join(MANIFEST_FILE)).unwrap();
        let from_files: Dataset<f64> = load_dataset(&reloaded, dir.path()).unwrap();
        let from_recipes: Dataset<f64> = load_dataset(&m, dir.path()).unwrap();
        assert_eq!(from_files.train.len(), 24);
        assert_eq!(from_files.test.len(), 6);
        for (a, b) in from_files.train.iter().zip(&from_recipes.train) {
            assert_eq!(a.id, b.id);
            assert_eq!(a.label, b.label);
            // files hold float32 coordinates
            for (p, q) in a.cloud.iter().zip(b.cloud.iter()) {
                assert!((*p - *q).norm() < 1e-6);
            }
        }
    }
}
