//! `cognoma` — sweep transmit SNR for a set of cognitive-NOMA scenarios and
//! print per-user outage estimates as CSV.

use std::io::Write;
use std::num::NonZeroUsize;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::Parser;

use cognoma::error::Error;
use cognoma::montecarlo::{sweep_snr, RunOptions, SweepTable};
use cognoma::scenario::{parse_scenario_file, Preset, PRESET_NAMES};

/// Monte Carlo outage simulator for cognitive-radio NOMA schemes.
///
/// Each run sweeps an SNR grid for one scenario set and writes a CSV table
/// with one row per (SNR point, scheme, user). Identical seeds give
/// bit-identical output regardless of --workers.
#[derive(Debug, Parser)]
#[command(name = "cognoma", version, about)]
struct Args {
    /// Built-in scenario set to run.
    #[arg(long, value_parser = PRESET_NAMES, conflicts_with = "config", required_unless_present = "config")]
    preset: Option<String>,

    /// TOML scenario file to run (see docs/scenario-format.md).
    #[arg(long)]
    config: Option<PathBuf>,

    /// SNR grid in dB, as start:stop:step (stop inclusive).
    #[arg(long, default_value = "0:40:5")]
    snr: String,

    /// Monte Carlo trials per SNR point.
    #[arg(long, default_value_t = 100_000, value_parser = clap::value_parser!(u64).range(1..))]
    trials: u64,

    /// Seed for the per-trial random streams.
    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Worker threads (1 = sequential). Defaults to all cores.
    #[arg(long, env = "COGNOMA_WORKERS")]
    workers: Option<NonZeroUsize>,

    /// Confidence level of the reported intervals.
    #[arg(long, default_value_t = 0.95)]
    confidence: f64,

    /// Write the CSV here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(&args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(err) => {
            eprintln!("error: {err}");
            match err {
                // Misconfiguration mirrors clap's usage-error exit code.
                Error::Config(_) | Error::Usage(_) => ExitCode::from(2),
                Error::Runtime(_) => ExitCode::FAILURE,
            }
        }
    }
}

fn run(args: &Args) -> Result<(), Error> {
    let configs = match (&args.preset, &args.config) {
        (Some(name), None) => Preset::by_name(name)?.configs,
        (None, Some(path)) => parse_scenario_file(path)?,
        // clap enforces exactly one of the two.
        _ => unreachable!("clap guarantees exactly one scenario source"),
    };

    let grid = parse_snr_grid(&args.snr)?;
    let opts = RunOptions {
        trials: args.trials,
        seed: args.seed,
        confidence: args.confidence,
        workers: args.workers,
    };

    let mut tables = Vec::with_capacity(configs.len());
    for cfg in &configs {
        tables.push(sweep_snr(cfg, &grid, &opts)?);
    }
    let csv = SweepTable::merged(tables)?.to_csv(args.seed);

    match &args.out {
        None => {
            let mut stdout = std::io::stdout().lock();
            stdout
                .write_all(csv.as_bytes())
                .map_err(|e| Error::Runtime(format!("cannot write to stdout: {e}")))?;
        }
        Some(path) => {
            std::fs::write(path, csv).map_err(|e| {
                Error::Runtime(format!("cannot write {}: {e}", path.display()))
            })?;
        }
    }
    Ok(())
}

/// Parse `start:stop:step` (dB) into an inclusive, strictly increasing grid.
fn parse_snr_grid(text: &str) -> Result<Vec<f64>, Error> {
    let bad = |detail: &str| {
        Error::Usage(format!(
            "invalid --snr `{text}`: {detail} (expected start:stop:step, e.g. 0:40:5)"
        ))
    };
    let parts: Vec<&str> = text.split(':').collect();
    if parts.len() != 3 {
        return Err(bad("need exactly three colon-separated numbers"));
    }
    let mut nums = [0.0f64; 3];
    for (slot, part) in nums.iter_mut().zip(&parts) {
        *slot = part
            .trim()
            .parse()
            .map_err(|_| bad(&format!("`{part}` is not a number")))?;
        if !slot.is_finite() {
            return Err(bad(&format!("`{part}` is not finite")));
        }
    }
    let [start, stop, step] = nums;
    if step <= 0.0 {
        return Err(bad("step must be positive"));
    }
    if stop < start {
        return Err(bad("stop must not be below start"));
    }
    // Tolerate float drift so e.g. 0:40:5 lands exactly on 40.
    let count = ((stop - start) / step + 1e-9).floor() as usize + 1;
    Ok((0..count).map(|i| start + i as f64 * step).collect())
}
