mod commands;
mod config;
mod error;
mod output;
mod stations;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::error::ErrorKind;
use clap::{Parser, Subcommand};

use commands::{ClusterArgs, Context, CurvesArgs, PassArgs, SweepArgs};
use config::LoadedConfig;
use error::CliError;

/// Satellite QKD network planning: station clustering, key-rate curves,
/// single-pass integration, altitude sweeps and constellation coverage.
///
/// Units: distances and altitudes in km, angles in degrees, times in
/// seconds, rates in bits/s. Results are written as CSV files to --out.
#[derive(Debug, Parser)]
#[command(name = "satqkd", version)]
struct Cli {
    /// Scenario config file (JSON); relative paths inside resolve against its directory
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Directory for output CSV files, created if missing
    #[arg(long, global = true, value_name = "DIR", default_value = ".")]
    out: PathBuf,
    /// Flag only, takes no value; accepted for reproducible scripts (all computations are deterministic)
    #[arg(long, global = true)]
    seedless: bool,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Cluster ground stations by great-circle distance (km) -> clusters.csv, centroids.csv
    Cluster(ClusterArgs),
    /// Key rate (bits/s) against elevation (deg) or slant range (km) -> rate_vs_*.csv
    Curves(CurvesArgs),
    /// Integrate one overhead pass (s, km, bits/s) -> pass.csv, pass_summary.csv
    Pass(PassArgs),
    /// Total bits per pass across altitudes (km) -> sweep.csv
    Sweep(SweepArgs),
    /// Coverage fractions and pairwise key rates for a config scenario -> coverage.csv, pairwise_rates.csv, duty_cycles.csv
    Coverage,
    /// Relay hemisphere duty cycles and ring feasibility for a config scenario -> duty_cycles.csv
    Relay,
}

fn run(cli: Cli) -> Result<String, CliError> {
    let ctx = Context {
        config: LoadedConfig::load(cli.config.as_deref())?,
        out_dir: cli.out,
    };
    match &cli.command {
        Command::Cluster(args) => commands::cmd_cluster(&ctx, args),
        Command::Curves(args) => commands::cmd_curves(&ctx, args),
        Command::Pass(args) => commands::cmd_pass(&ctx, args),
        Command::Sweep(args) => commands::cmd_sweep(&ctx, args),
        Command::Coverage => commands::cmd_coverage(&ctx),
        Command::Relay => commands::cmd_relay(&ctx),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) if e.kind() == ErrorKind::DisplayHelpOnMissingArgumentOrSubcommand => {
            eprintln!("usage_error: missing subcommand or argument; run with --help");
            return ExitCode::from(2);
        }
        Err(e) => {
            let text = e.to_string();
            let first = text.lines().next().unwrap_or("invalid arguments");
            eprintln!("usage_error: {}", first.trim_start_matches("error: "));
            return ExitCode::from(2);
        }
    };
    match run(cli) {
        Ok(summary) => {
            println!("{summary}");
            ExitCode::SUCCESS
        }
        Err(e) => {
            eprintln!("{}: {}", e.code(), e.to_string().replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}
