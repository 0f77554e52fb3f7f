use std::io::Write;

use gtnet_core::data::random_split;
use gtnet_core::models::{infer, load_checkpoint, GraphContext};
use gtnet_core::training::{evaluate, Metrics};
use serde::Serialize;

use crate::args::EvalArgs;
use crate::error::{CliError, CliResult};
use crate::experiment::{load, RANDOM_SPLIT_TRAIN, RANDOM_SPLIT_VAL};
use crate::output::{write_json, SCHEMA_VERSION};

#[derive(Debug, Serialize)]
pub struct EvalReport {
    pub schema_version: u32,
    pub dataset: String,
    pub model: gtnet_core::models::Arch,
    pub hops: usize,
    pub train: Metrics,
    pub val: Metrics,
    pub test: Metrics,
}

pub fn eval(args: &EvalArgs, out: &mut dyn Write) -> CliResult<EvalReport> {
    let ckpt = load_checkpoint(&args.checkpoint)?;
    let data = load(&args.dataset, args.data_dir.as_deref(), args.row_normalize)?;
    let b = &data.bundle;
    if ckpt.in_dim != b.num_features() || ckpt.classes != b.num_classes {
        return Err(CliError::runtime(format!(
            "checkpoint expects D={}, C={} but dataset has D={}, C={}",
            ckpt.in_dim,
            ckpt.classes,
            b.num_features(),
            b.num_classes
        )));
    }
    let splits = match &b.splits {
        Some(s) => s.clone(),
        None => random_split(&b.labels, b.num_classes, RANDOM_SPLIT_TRAIN, RANDOM_SPLIT_VAL, args.seed)?,
    };
    let spec = ckpt.spec(args.scheme);
    let ctx = GraphContext::<f32>::new(&b.graph, args.scheme);
    let log_probs = infer(&spec, &ctx, &ckpt.params, &b.features)?;
    let report = EvalReport {
        schema_version: SCHEMA_VERSION,
        dataset: data.label.clone(),
        model: spec.arch,
        hops: spec.hops,
        train: evaluate(&log_probs, &b.labels, &splits.train)?,
        val: evaluate(&log_probs, &b.labels, &splits.val)?,
        test: evaluate(&log_probs, &b.labels, &splits.test)?,
    };
    writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(CliError::runtime)?)?;
    if let Some(path) = &args.out {
        write_json(path, &report)?;
    }
    Ok(report)
}
