use std::io::Write;

use gtnet_core::models::{save_checkpoint, Checkpoint};
use serde_json::json;

use crate::args::TrainArgs;
use crate::error::CliResult;
use crate::experiment::{aggregate, load, run_all, setup, timings};
use crate::output::{write_json, SCHEMA_VERSION};

pub fn train(args: &TrainArgs, out: &mut dyn Write) -> CliResult<()> {
    let flags = &args.run;
    let data = load(&flags.dataset, flags.data_dir.as_deref(), flags.row_normalize)?;
    let setup = setup(args.model, args.hops, flags, &data)?;
    let runs = run_all(&setup, &data.bundle, flags.jobs)?;

    let dir = &flags.out;
    for r in &runs {
        write_json(&dir.join("runs").join(format!("run-{:03}.json", r.record.index)), &r.record)?;
        if args.save_checkpoints {
            let path = dir.join("checkpoints").join(format!("run-{:03}.gtnt", r.record.index));
            crate::output::ensure_dir(path.parent().unwrap())?;
            save_checkpoint(&path, &Checkpoint::new(&setup.spec, r.params.clone()))?;
        }
    }
    let agg = aggregate(&setup, &data.label, &runs);
    write_json(&dir.join("aggregate.json"), &agg)?;
    write_json(
        &dir.join("timing.json"),
        &json!({ "schema_version": SCHEMA_VERSION, "runs": timings(&runs) }),
    )?;

    let acc = &agg.test_accuracy;
    writeln!(
        out,
        "{} on {}: test accuracy {:.4}{} over {} runs ({} retained)",
        setup.spec.arch,
        data.label,
        acc.mean,
        acc.std.map(|s| format!(" ± {s:.4}")).unwrap_or_default(),
        agg.runs,
        acc.retained
    )?;
    writeln!(out, "results written to {}", dir.display())?;
    Ok(())
}
