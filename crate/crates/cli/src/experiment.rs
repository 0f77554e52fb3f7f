//! Resolving flags into a model and training setup, and executing seeded runs.

use std::path::{Path, PathBuf};
use std::time::Instant;

use gtnet_core::data::{load_dataset, random_split, DatasetBundle, Splits};
use gtnet_core::models::{Arch, GraphContext, ModelSpec, ParameterSet};
use gtnet_core::training::{train_with_context, trimmed_stats, RunResult, TrainConfig};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::args::RunFlags;
use crate::error::{CliError, CliResult};
use crate::presets::{fallback, published_preset, DatasetName, Preset};

/// Fraction trimmed from each end before averaging run metrics.
pub const TRIM_FRACTION: f64 = 0.1;
/// Per-class split sizes used when a dataset ships without splits.
pub const RANDOM_SPLIT_TRAIN: usize = 20;
pub const RANDOM_SPLIT_VAL: usize = 30;

#[derive(Debug)]
pub struct LoadedDataset {
    pub bundle: DatasetBundle,
    /// Directory name, used in outputs so they do not depend on absolute paths.
    pub label: String,
}

/// A path that exists is used as is; otherwise the name is looked up under
/// the data root.
pub fn resolve_dataset(name: &str, data_dir: Option<&Path>) -> CliResult<PathBuf> {
    let direct = PathBuf::from(name);
    if direct.is_dir() {
        return Ok(direct);
    }
    if let Some(root) = data_dir {
        let under = root.join(name);
        if under.is_dir() {
            return Ok(under);
        }
        return Err(CliError::runtime(format!(
            "dataset '{name}' not found (neither a directory nor present under {})",
            root.display()
        )));
    }
    Err(CliError::runtime(format!("dataset '{name}' not found and GTNET_DATA_DIR is not set")))
}

pub fn load(name: &str, data_dir: Option<&Path>, row_normalize: bool) -> CliResult<LoadedDataset> {
    let dir = resolve_dataset(name, data_dir)?;
    let mut bundle = load_dataset(&dir)?;
    if row_normalize {
        bundle.row_normalize_features();
    }
    let label = dir
        .canonicalize()
        .ok()
        .and_then(|p| p.file_name().map(|f| f.to_string_lossy().into_owned()))
        .unwrap_or_else(|| name.to_string());
    Ok(LoadedDataset { bundle, label })
}

/// Preset named by `--preset`, if any.
pub fn preset_dataset(preset: Option<&str>, label: &str) -> CliResult<Option<DatasetName>> {
    match preset {
        None | Some("none") => Ok(None),
        Some("published") => label.parse().map(Some).map_err(|e| {
            CliError::usage(format!("{e}; name the dataset explicitly with --preset published:<dataset>"))
        }),
        Some(p) => match p.strip_prefix("published:") {
            Some(d) => d.parse().map(Some).map_err(CliError::usage),
            None => Err(CliError::usage(format!("unknown preset '{p}' (valid: none, published, published:<dataset>)"))),
        },
    }
}

/// Model and optimizer settings for one experiment cell.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Setup {
    pub spec: ModelSpec,
    pub config: TrainConfig,
    pub preset: Option<DatasetName>,
}

pub fn setup(arch: Arch, hops: Option<usize>, flags: &RunFlags, data: &LoadedDataset) -> CliResult<Setup> {
    let preset = preset_dataset(flags.preset.as_deref(), &data.label)?;
    let base: Preset = match preset {
        Some(d) => published_preset(arch, d, hops),
        None => Preset { hops: hops.unwrap_or(fallback(arch).hops), ..fallback(arch) },
    };
    if flags.jobs == 0 {
        return Err(CliError::usage("--jobs must be at least 1"));
    }
    let spec = ModelSpec {
        arch,
        hops: base.hops,
        in_dim: data.bundle.num_features(),
        hidden: flags.hidden.unwrap_or(base.hidden),
        classes: data.bundle.num_classes,
        dropout_input: flags.dropout_input.unwrap_or(base.dropout_input),
        dropout_prop: flags.dropout_prop.unwrap_or(base.dropout_prop),
        scheme: flags.scheme,
    };
    let config = TrainConfig {
        lr: flags.lr.unwrap_or(base.lr),
        weight_decay: flags.weight_decay.unwrap_or(base.weight_decay),
        max_epochs: flags.max_epochs.unwrap_or(base.max_epochs),
        patience: flags.patience.unwrap_or(base.patience),
        seed: flags.seed,
        runs: flags.runs,
    };
    let config = TrainConfig {
        // A shortened run keeps patience from exceeding it.
        patience: if flags.patience.is_none() { config.patience.min(config.max_epochs) } else { config.patience },
        ..config
    };
    spec.validate().map_err(CliError::usage)?;
    config.validate().map_err(CliError::usage)?;
    Ok(Setup { spec, config, preset })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunRecord {
    pub schema_version: u32,
    pub index: usize,
    pub seed: u64,
    /// Seed of the random split, when the dataset ships none.
    pub split_seed: Option<u64>,
    pub result: RunResult,
}

pub struct RunOutcome {
    pub record: RunRecord,
    pub params: ParameterSet<f32>,
    pub wall_seconds: f64,
}

fn run_one(setup: &Setup, bundle: &DatasetBundle, ctx: &GraphContext<f32>, index: usize) -> CliResult<RunOutcome> {
    let seed = setup.config.seed.wrapping_add(index as u64);
    let started = Instant::now();
    let (split_seed, owned);
    let data = if bundle.splits.is_some() {
        split_seed = None;
        bundle
    } else {
        let s: Splits = random_split(&bundle.labels, bundle.num_classes, RANDOM_SPLIT_TRAIN, RANDOM_SPLIT_VAL, seed)?;
        split_seed = Some(seed);
        owned = DatasetBundle { splits: Some(s), ..bundle.clone() };
        &owned
    };
    let (result, params) = train_with_context(&setup.spec, data, ctx, &setup.config, seed)
        .map_err(|e| CliError::runtime(format!("run {index} (seed {seed}): {e}")))?;
    Ok(RunOutcome {
        record: RunRecord { schema_version: crate::output::SCHEMA_VERSION, index, seed, split_seed, result },
        params,
        wall_seconds: started.elapsed().as_secs_f64(),
    })
}

/// All runs of one setup, in index order. With `jobs > 1` runs execute on a
/// dedicated pool; each run is unaffected by the others.
pub fn run_all(setup: &Setup, bundle: &DatasetBundle, jobs: usize) -> CliResult<Vec<RunOutcome>> {
    let ctx = GraphContext::<f32>::new(&bundle.graph, setup.spec.scheme);
    let indices: Vec<usize> = (0..setup.config.runs).collect();
    if jobs <= 1 {
        return indices.iter().map(|&i| run_one(setup, bundle, &ctx, i)).collect();
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(jobs)
        .build()
        .map_err(CliError::runtime)?;
    pool.install(|| indices.par_iter().map(|&i| run_one(setup, bundle, &ctx, i)).collect())
}

/// Trimmed mean and sample standard deviation. With fewer than three runs
/// nothing is trimmed and the deviation is reported only for two.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Summary {
    pub mean: f64,
    pub std: Option<f64>,
    pub retained: usize,
    pub dropped_per_end: usize,
}

pub fn summarize(values: &[f64]) -> Summary {
    if let Ok(t) = trimmed_stats(values, TRIM_FRACTION) {
        return Summary { mean: t.mean, std: Some(t.std), retained: t.retained, dropped_per_end: t.dropped_per_end };
    }
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let std = (values.len() >= 2).then(|| (values.iter().map(|v| (v - mean).powi(2)).sum::<f64>() / (n - 1.0)).sqrt());
    Summary { mean, std, retained: values.len(), dropped_per_end: 0 }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Aggregate {
    pub schema_version: u32,
    pub model: Arch,
    pub dataset: String,
    pub spec: ModelSpec,
    pub config: TrainConfig,
    pub preset: Option<DatasetName>,
    pub runs: usize,
    pub test_accuracy: Summary,
    pub test_macro_f1: Summary,
    pub best_val_accuracy: Summary,
    pub test_accuracy_per_run: Vec<f64>,
    pub best_epochs: Vec<usize>,
}

pub fn aggregate(setup: &Setup, dataset: &str, runs: &[RunOutcome]) -> Aggregate {
    let pick = |f: fn(&RunResult) -> f64| runs.iter().map(|r| f(&r.record.result)).collect::<Vec<f64>>();
    let acc = pick(|r| r.test_acc);
    Aggregate {
        schema_version: crate::output::SCHEMA_VERSION,
        model: setup.spec.arch,
        dataset: dataset.to_string(),
        spec: setup.spec.clone(),
        config: setup.config.clone(),
        preset: setup.preset,
        runs: runs.len(),
        test_accuracy: summarize(&acc),
        test_macro_f1: summarize(&pick(|r| r.test_macro_f1)),
        best_val_accuracy: summarize(&pick(|r| r.best_val_acc)),
        test_accuracy_per_run: acc,
        best_epochs: runs.iter().map(|r| r.record.result.best_epoch).collect(),
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct RunTiming {
    pub index: usize,
    pub epochs: usize,
    pub wall_seconds: f64,
    pub ms_per_epoch: f64,
}

pub fn timings(runs: &[RunOutcome]) -> Vec<RunTiming> {
    runs.iter()
        .map(|r| {
            let e = &r.record.result.epoch_seconds;
            RunTiming {
                index: r.record.index,
                epochs: e.len(),
                wall_seconds: r.wall_seconds,
                ms_per_epoch: if e.is_empty() { 0.0 } else { 1e3 * e.iter().sum::<f64>() / e.len() as f64 },
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn summary_of_few_runs() {
        let s = summarize(&[0.5]);
        assert_eq!((s.mean, s.std, s.retained), (0.5, None, 1));
        let s = summarize(&[0.4, 0.6]);
        assert!((s.mean - 0.5).abs() < 1e-15);
        assert!((s.std.unwrap() - 0.02f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn summary_trims_thirty_runs() {
        let v: Vec<f64> = (0..30).map(|i| i as f64 / 30.0).collect();
        let s = summarize(&v);
        assert_eq!((s.retained, s.dropped_per_end), (24, 3));
    }

    #[test]
    fn preset_parsing() {
        assert_eq!(preset_dataset(None, "x").unwrap(), None);
        assert_eq!(preset_dataset(Some("published"), "cora").unwrap(), Some(DatasetName::Cora));
        assert_eq!(preset_dataset(Some("published:pubmed"), "x").unwrap(), Some(DatasetName::Pubmed));
        assert!(matches!(preset_dataset(Some("published"), "mystery"), Err(CliError::Usage(_))));
        assert!(matches!(preset_dataset(Some("fast"), "cora"), Err(CliError::Usage(_))));
    }
}
