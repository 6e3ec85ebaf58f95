//! Command-line front end: run a scenario sweep or validate a scenario file.

use std::fs::File;
use std::io::BufWriter;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use etmrs::config;
use etmrs::sweep::{run_sweep, SweepError, SweepOptions};

#[derive(Parser)]
#[command(name = "etmrs", version, about = "Outage analysis and simulation for energy-threshold relay selection")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every sweep point and write a CSV.
    Run(RunArgs),
    /// Check a scenario file without running it.
    Validate {
        #[arg(long)]
        config: PathBuf,
    },
}

#[derive(Args)]
struct RunArgs {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    out: PathBuf,
    /// Simulate every point (file `sim` settings, or defaults).
    #[arg(long, conflicts_with = "no_mc")]
    mc: bool,
    /// Skip simulation even if the file has a `sim` section.
    #[arg(long)]
    no_mc: bool,
    /// Worker threads (default: all cores).
    #[arg(long)]
    threads: Option<usize>,
    /// Overrides the file's simulation seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Append a wall-time column (makes reruns differ).
    #[arg(long)]
    timing: bool,
}

fn run(args: RunArgs) -> Result<(), SweepError> {
    if let Some(k) = args.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(k.max(1))
            .build_global()
            .expect("thread pool is configured once");
    }
    let file = config::load(&args.config)?;
    let mut monte_carlo = match (args.mc, args.no_mc) {
        (_, true) => None,
        (true, _) => Some(file.sim_config().unwrap_or_default()),
        _ => file.sim_config(),
    };
    if let (Some(cfg), Some(seed)) = (monte_carlo.as_mut(), args.seed) {
        cfg.seed = seed;
    }
    let options = SweepOptions {
        monte_carlo,
        timing: args.timing,
    };
    // validate before touching the output path
    file.points()?;
    let mut out = BufWriter::new(File::create(&args.out)?);
    let rows = run_sweep(&file, &options, &mut out, |row| {
        eprintln!(
            "point {}: p_out = {:.6e} ({:.2} s)",
            row.point.index,
            row.p_out_analytic,
            row.wall_time.as_secs_f64()
        );
    })?;
    eprintln!("wrote {rows} rows to {}", args.out.display());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => match run(args) {
            Ok(()) => ExitCode::SUCCESS,
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(e.exit_code() as u8)
            }
        },
        Command::Validate { config } => match config::load(&config) {
            Err(e) => {
                eprintln!("error: {e}");
                ExitCode::from(2)
            }
            Ok(file) => {
                let diags = file.validate();
                if diags.is_empty() {
                    println!("OK");
                    ExitCode::SUCCESS
                } else {
                    for d in &diags {
                        println!("{d}");
                    }
                    ExitCode::from(2)
                }
            }
        },
    }
}

