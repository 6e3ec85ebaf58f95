//! Runs a scenario file and prints the CSV to stdout.
//!
//!     cargo run --release --example figure_sweep -- configs/fig6.json
//!
//! With no argument it runs `configs/quickstart.json`.

use std::io;
use std::process::ExitCode;

use etmrs::config;
use etmrs::sweep::{run_sweep, SweepOptions};

fn main() -> ExitCode {
    let path = std::env::args()
        .nth(1)
        .unwrap_or_else(|| concat!(env!("CARGO_MANIFEST_DIR"), "/configs/quickstart.json").to_string());
    let file = match config::load(&path) {
        Ok(f) => f,
        Err(e) => {
            eprintln!("{e}");
            return ExitCode::from(2);
        }
    };
    let options = SweepOptions {
        monte_carlo: file.sim_config(),
        timing: false,
    };
    let stdout = io::stdout();
    match run_sweep(&file, &options, &mut stdout.lock(), |_| {}) {
        Ok(rows) => {
            eprintln!("{rows} rows");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
