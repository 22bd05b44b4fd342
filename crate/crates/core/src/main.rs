//! Command-line front end: `single`, `sweep-density`, `sweep-antennas`.
//!
//! Exit codes: 0 on success, 2 on configuration errors (malformed file,
//! out-of-range value, bad override), 3 on I/O errors (unreadable config,
//! unwritable output).

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use rfharvest::config::{load_config, ConfigError, RunConfig};
use rfharvest::montecarlo::{derive_trial_seed, draw_realization, sweep_antennas, sweep_density};
use rfharvest::report::{antenna_csv, density_csv, single_csv, single_report};
use rfharvest::schemes::run_scheme;

#[derive(Parser)]
#[command(
    name = "rfharvest",
    version,
    about = "Monte Carlo simulator of dynamic RF combining for ambient RF energy harvesting"
)]
struct Cli {
    /// Key=value configuration file (omitted keys keep reference defaults).
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    /// Override the ensemble master seed.
    #[arg(long, global = true, value_name = "SEED")]
    seed: Option<u64>,

    /// Override the output path.
    #[arg(long, global = true, value_name = "PATH")]
    out: Option<PathBuf>,

    /// Override the number of trials per sweep point.
    #[arg(long, global = true, value_name = "N")]
    trials: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run every configured scheme on one seeded realization and print the
    /// full energy ledger.
    Single,
    /// Sweep transmitter density over a log-spaced grid and write the
    /// aggregate CSV.
    SweepDensity,
    /// Sweep the antenna count, selecting the best shifter resolution per
    /// scheme, and write the aggregate CSV.
    SweepAntennas,
}

enum CliError {
    Config(String),
    Io(String),
}

impl CliError {
    fn exit_code(&self) -> ExitCode {
        match self {
            CliError::Config(_) => ExitCode::from(2),
            CliError::Io(_) => ExitCode::from(3),
        }
    }

    fn message(&self) -> &str {
        match self {
            CliError::Config(m) | CliError::Io(m) => m,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::Io(_) => CliError::Io(e.to_string()),
            ConfigError::Parse { .. } => CliError::Config(e.to_string()),
        }
    }
}

impl From<rfharvest::SimError> for CliError {
    fn from(e: rfharvest::SimError) -> Self {
        CliError::Config(e.to_string())
    }
}

fn effective_config(cli: &Cli) -> Result<RunConfig, CliError> {
    let mut config = match &cli.config {
        Some(path) => load_config(path)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        config.master_seed = seed;
    }
    if let Some(out) = &cli.out {
        config.out = out.display().to_string();
    }
    if let Some(trials) = cli.trials {
        if trials == 0 {
            return Err(CliError::Config("--trials must be >= 1".into()));
        }
        config.trials = trials;
    }
    Ok(config)
}

fn write_output(path: &str, contents: &str) -> Result<(), CliError> {
    std::fs::write(path, contents)
        .map_err(|e| CliError::Io(format!("cannot write `{path}`: {e}")))
}

fn cmd_single(config: &RunConfig) -> Result<(), CliError> {
    let setup = config.trial_setup();
    let trial_seed = derive_trial_seed(config.master_seed, 0, 0);
    let realization = draw_realization(&setup, trial_seed)?;
    let results = config
        .schemes
        .iter()
        .map(|&s| run_scheme(s, &realization.channel, &setup.params, setup.ga_lossy))
        .collect::<rfharvest::Result<Vec<_>>>()?;
    print!("{}", single_report(&setup, &realization, &results));
    if !config.out.is_empty() {
        write_output(&config.out, &single_csv(&results))?;
    }
    Ok(())
}

fn cmd_sweep_density(config: &RunConfig) -> Result<(), CliError> {
    let rows = sweep_density(&config.sweep_spec(), &config.lambda_grid())?;
    let path = if config.out.is_empty() { "sweep_density.csv" } else { &config.out };
    write_output(path, &density_csv(&rows))?;
    eprintln!("wrote {} rows to {path}", rows.len());
    Ok(())
}

fn cmd_sweep_antennas(config: &RunConfig) -> Result<(), CliError> {
    let rows = sweep_antennas(&config.sweep_spec(), &config.antenna_values())?;
    let path = if config.out.is_empty() { "sweep_antennas.csv" } else { &config.out };
    write_output(path, &antenna_csv(&rows))?;
    eprintln!("wrote {} rows to {path}", rows.len());
    Ok(())
}

fn run(cli: &Cli) -> Result<(), CliError> {
    let config = effective_config(cli)?;
    match cli.command {
        Command::Single => cmd_single(&config),
        Command::SweepDensity => cmd_sweep_density(&config),
        Command::SweepAntennas => cmd_sweep_antennas(&config),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {}", e.message());
            e.exit_code()
        }
    }
}
