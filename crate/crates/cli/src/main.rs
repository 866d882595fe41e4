use std::process::ExitCode;

use clap::Parser;
use flowembed::args::Cli;
use flowembed::commands;

fn main() -> ExitCode {
    if let Some(n) = std::env::var("FLOWEMBED_THREADS").ok().and_then(|v| v.parse::<usize>().ok()) {
        // a second initialisation only fails when a pool already exists
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::from(1),
        Err(e) => {
            eprintln!("{}", e.to_json());
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
