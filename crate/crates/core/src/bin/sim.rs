use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;
use irs_noma::experiments::{self, ExperimentConfig, RunSummary};
use irs_noma::{Error, Result};

/// Runs an IRS-NOMA experiment described by a `key = value` config file.
#[derive(Debug, Parser)]
#[command(name = "sim", version)]
struct Args {
    /// Experiment config file.
    config: PathBuf,
    /// Override the config seed.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the config trial count.
    #[arg(long)]
    trials: Option<u64>,
    /// Override the CSV output path.
    #[arg(long = "out")]
    out: Option<PathBuf>,
}

fn configure_workers() -> Result<()> {
    let Ok(raw) = std::env::var("SIM_WORKERS") else {
        return Ok(());
    };
    let n: usize = raw
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Error::Config(format!("SIM_WORKERS must be a positive integer, got '{raw}'")))?;
    rayon::ThreadPoolBuilder::new()
        .num_threads(n)
        .build_global()
        .map_err(|e| Error::Config(e.to_string()))
}

fn print_summary(cfg: &ExperimentConfig, summary: &RunSummary) {
    println!("{}: {} rows", cfg.kind.label(), summary.rows.len());
    if let Some(path) = &cfg.output {
        println!("wrote {}", path.display());
    }
    if summary.insufficient_failures > 0 {
        println!(
            "{} estimates have fewer than {} failures",
            summary.insufficient_failures,
            irs_noma::montecarlo::MIN_FAILURES
        );
    }
    for f in &summary.fits {
        let expected = f.expected.map_or_else(|| "-".to_string(), |d| format!("{d}"));
        match &f.fit {
            Ok(fit) => println!(
                "fit K={} b={} {} user {}: slope {:.3} (expected {expected}), r2 {:.4}, {} points over {:.1}..{:.1} dB",
                f.elements,
                f.resolution,
                f.scheme,
                f.user,
                fit.slope,
                fit.r_squared,
                fit.points_used,
                fit.window.0,
                fit.window.1
            ),
            Err(e) => println!(
                "fit K={} b={} {} user {}: {e}",
                f.elements, f.resolution, f.scheme, f.user
            ),
        }
    }
    for note in &summary.notes {
        println!("note: {note}");
    }
}

fn run(args: Args) -> Result<()> {
    configure_workers()?;
    let text = std::fs::read_to_string(&args.config)?;
    let mut cfg = ExperimentConfig::parse(&text)?;
    if let Some(seed) = args.seed {
        cfg.seed = seed;
    }
    if let Some(trials) = args.trials {
        cfg.trials = trials;
    }
    if args.out.is_some() {
        cfg.output = args.out;
    }
    let summary = experiments::run(&cfg)?;
    print_summary(&cfg, &summary);
    Ok(())
}

fn main() -> ExitCode {
    match run(Args::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}: {e}", e.code());
            ExitCode::from(e.exit_code())
        }
    }
}
