use std::io::Write;

use gtnet_core::models::Arch;
use serde::Serialize;
use serde_json::json;

use crate::args::SweepArgs;
use crate::error::{CliError, CliResult};
use crate::experiment::{aggregate, load, run_all, setup, timings, Aggregate, RunOutcome};
use crate::output::{write_csv, write_json, SCHEMA_VERSION};

/// A run counts as stuck when its best training accuracy stays within this
/// margin of the majority-class rate of the training split.
pub const STUCK_MARGIN: f64 = 0.1;

#[derive(Clone, Debug, Serialize)]
pub struct Cell {
    pub model: Arch,
    pub depth: usize,
    pub runs: usize,
    pub test_acc_mean: f64,
    pub test_acc_std: Option<f64>,
    pub test_macro_f1_mean: f64,
    pub best_val_acc_mean: f64,
    /// Mean over runs of the highest training accuracy reached.
    pub max_train_acc: f64,
    pub majority_rate: f64,
    pub over_smoothed: bool,
}

#[derive(Serialize)]
struct TraceRow {
    run: usize,
    epoch: usize,
    train_loss: f64,
    val_loss: f64,
    train_acc: f64,
    val_acc: f64,
}

fn majority_rate(labels: &[usize], nodes: &[usize], classes: usize) -> f64 {
    let mut counts = vec![0usize; classes];
    for &u in nodes {
        counts[labels[u]] += 1;
    }
    counts.into_iter().max().unwrap_or(0) as f64 / nodes.len().max(1) as f64
}

fn cell(agg: &Aggregate, runs: &[RunOutcome], majority: f64) -> Cell {
    let max_train = runs
        .iter()
        .map(|r| r.record.result.train_acc.iter().copied().fold(0.0, f64::max))
        .sum::<f64>()
        / runs.len() as f64;
    Cell {
        model: agg.model,
        depth: agg.spec.hops,
        runs: agg.runs,
        test_acc_mean: agg.test_accuracy.mean,
        test_acc_std: agg.test_accuracy.std,
        test_macro_f1_mean: agg.test_macro_f1.mean,
        best_val_acc_mean: agg.best_val_accuracy.mean,
        max_train_acc: max_train,
        majority_rate: majority,
        over_smoothed: max_train <= majority + STUCK_MARGIN,
    }
}

/// Runs every (model, depth) pair and writes `<table>.csv`, `<table>.json`
/// and per-cell epoch traces.
pub fn sweep(args: &SweepArgs, table: &str, default_models: &[Arch], out: &mut dyn Write) -> CliResult<Vec<Cell>> {
    let flags = &args.run;
    if args.depths.is_empty() || args.depths.contains(&0) {
        return Err(CliError::usage("--depths needs one or more positive depths"));
    }
    let models: &[Arch] = if args.models.is_empty() { default_models } else { &args.models };
    let data = load(&flags.dataset, flags.data_dir.as_deref(), flags.row_normalize)?;

    let mut cells = Vec::new();
    let mut aggregates = Vec::new();
    let mut timing = Vec::new();
    for &model in models {
        for &depth in &args.depths {
            let setup = setup(model, Some(depth), flags, &data)?;
            let runs = run_all(&setup, &data.bundle, flags.jobs)?;
            let agg = aggregate(&setup, &data.label, &runs);
            // Fixed splits give one majority rate; random splits are balanced by construction.
            let majority = match &data.bundle.splits {
                Some(s) => majority_rate(&data.bundle.labels, &s.train, data.bundle.num_classes),
                None => 1.0 / data.bundle.num_classes as f64,
            };
            let c = cell(&agg, &runs, majority);
            writeln!(
                out,
                "{model:>10} depth {depth:>3}: test {:.4}, max train {:.4}{}",
                c.test_acc_mean,
                c.max_train_acc,
                if c.over_smoothed { "  [over-smoothed]" } else { "" }
            )?;
            let trace: Vec<TraceRow> = runs
                .iter()
                .flat_map(|r| {
                    let res = &r.record.result;
                    (0..res.epochs_run).map(move |e| TraceRow {
                        run: r.record.index,
                        epoch: e,
                        train_loss: res.train_loss[e],
                        val_loss: res.val_loss[e],
                        train_acc: res.train_acc[e],
                        val_acc: res.val_acc[e],
                    })
                })
                .collect();
            write_csv(&flags.out.join("traces").join(format!("{model}-L{depth}.csv")), &trace)?;
            timing.push(json!({ "model": model, "depth": depth, "runs": timings(&runs) }));
            cells.push(c);
            aggregates.push(agg);
        }
    }
    write_csv(&flags.out.join(format!("{table}.csv")), &cells)?;
    write_json(
        &flags.out.join(format!("{table}.json")),
        &json!({ "schema_version": SCHEMA_VERSION, "dataset": data.label, "cells": aggregates }),
    )?;
    write_json(&flags.out.join("timing.json"), &json!({ "schema_version": SCHEMA_VERSION, "cells": timing }))?;
    writeln!(out, "{} cells written to {}", cells.len(), flags.out.join(format!("{table}.csv")).display())?;
    Ok(cells)
}
