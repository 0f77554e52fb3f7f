use std::io::Write;

use gtnet_core::analysis::{verify_graph, VerificationReport, VerifyOptions};
use gtnet_core::graph::synthesize;

use crate::args::VerifyArgs;
use crate::error::{CliError, CliResult};
use crate::experiment::load;
use crate::output::write_json;

/// Prints the report; a failing check becomes a runtime error (exit 1).
pub fn verify(args: &VerifyArgs, out: &mut dyn Write) -> CliResult<VerificationReport> {
    let graph = match (&args.graph, &args.dataset) {
        (Some(kind), None) => synthesize(kind).map_err(CliError::usage)?,
        (None, Some(name)) => load(name, args.data_dir.as_deref(), false)?.bundle.graph,
        _ => return Err(CliError::usage("verify needs exactly one of --graph or --dataset")),
    };
    let mut opts = VerifyOptions { seed: args.seed, ..VerifyOptions::default() };
    if let Some(d) = &args.depths {
        if d.is_empty() || d.windows(2).any(|w| w[1] <= w[0]) {
            return Err(CliError::usage("--depths must be strictly increasing"));
        }
        opts.depths = d.clone();
    }
    let report = verify_graph(&graph, &opts)?;
    if args.json {
        writeln!(out, "{}", serde_json::to_string_pretty(&report).map_err(CliError::runtime)?)?;
    } else {
        write!(out, "{}", report.to_text())?;
    }
    if let Some(path) = &args.out {
        write_json(path, &report)?;
    }
    if !report.passed() {
        let failed: Vec<&str> = report
            .checks
            .iter()
            .filter(|c| c.status == gtnet_core::analysis::CheckStatus::Fail)
            .map(|c| c.name.as_str())
            .collect();
        return Err(CliError::runtime(format!("failed checks: {}", failed.join(", "))));
    }
    Ok(report)
}
