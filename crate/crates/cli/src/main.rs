use std::io;
use std::process::ExitCode;

use clap::Parser;
use gtnet_cli::args::Cli;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    match gtnet_cli::run(&cli, &mut stdout.lock()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("gtnet: {e}");
            e.exit_code()
        }
    }
}
