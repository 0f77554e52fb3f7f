//! Library side of the `gtnet` command: flag definitions, published presets,
//! and the train, sweep, verify, synth and eval commands.

pub mod args;
pub mod commands;
pub mod error;
pub mod experiment;
pub mod output;
pub mod presets;

use std::io::Write;

use gtnet_core::models::Arch;

use args::{Cli, Command};
pub use error::{CliError, CliResult};

/// Models compared by `sweep-depth` unless `--models` is given.
pub const SWEEP_MODELS: [Arch; 4] = [Arch::Gtcn, Arch::Gtan, Arch::Gcn, Arch::Gat];

pub fn run(cli: &Cli, out: &mut dyn Write) -> CliResult<()> {
    match &cli.command {
        Command::Train(a) => commands::train(a, out),
        Command::Eval(a) => commands::eval(a, out).map(drop),
        Command::SweepDepth(a) => commands::sweep(a, "sweep", &SWEEP_MODELS, out).map(drop),
        Command::Ablation(a) => commands::sweep(a, "ablation", &Arch::ALL, out).map(drop),
        Command::Verify(a) => commands::verify(a, out).map(drop),
        Command::Synth(a) => commands::synth(a, out),
    }
}
