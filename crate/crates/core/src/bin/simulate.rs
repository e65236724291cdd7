use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use cogbeam::experiment::{emit_report, load_config, run_experiment};

/// Monte-Carlo sweep of multi-beam spectrum sharing.
#[derive(Debug, Parser)]
#[command(name = "simulate", version)]
struct Args {
    /// Experiment config (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Output CSV; defaults to `run.output` from the config.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Overrides `run.seed`.
    #[arg(long)]
    seed: Option<u64>,
    /// Worker threads; defaults to all cores.
    #[arg(long)]
    threads: Option<usize>,
}

fn run(args: Args) -> cogbeam::Result<()> {
    if let Some(n) = args.threads {
        if n == 0 {
            return Err(cogbeam::Error::Config("--threads must be positive".into()));
        }
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| cogbeam::Error::Config(e.to_string()))?;
    }
    let mut config = load_config(&args.config)?;
    if let Some(seed) = args.seed {
        config.run.seed = seed;
    }
    let out = args.out.unwrap_or_else(|| config.run.output.clone());
    let table = run_experiment(&config)?;
    let paths = emit_report(&table, &out)?;
    print!("{}", table.summary());
    eprintln!("wrote {}", paths.csv.display());
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
