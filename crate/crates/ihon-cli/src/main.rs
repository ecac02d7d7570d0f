//! `ihon`: run node simulations and link-budget tables from a JSON config.
//!
//! Exit codes: 0 on success, 1 on configuration or I/O errors, 3 when a
//! simulation halts on an internal invariant violation.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, ValueEnum};

use ihon_sim::budget::builtin_profiles;
use ihon_sim::config::{ConfigError, ExperimentConfig, Mode};
use ihon_sim::runner;
use ihon_sim::SimError;

#[derive(Debug, Parser)]
#[command(
    name = "ihon",
    about = "Hybrid optical node simulator and fronthaul budget calculator",
    version
)]
struct Args {
    /// JSON configuration file.
    #[arg(long)]
    config: PathBuf,

    /// Output file; stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,

    /// Experiment mode; overrides the config file's `mode`.
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,

    /// Comma-separated seed list replacing the configured seeds.
    #[arg(long, value_delimiter = ',')]
    seed_override: Option<Vec<u64>>,

    /// Write the raw per-event log here (single mode only).
    #[arg(long)]
    event_log: Option<PathBuf>,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum ModeArg {
    Single,
    Sweep,
    Budget,
}

impl From<ModeArg> for Mode {
    fn from(m: ModeArg) -> Mode {
        match m {
            ModeArg::Single => Mode::Single,
            ModeArg::Sweep => Mode::Sweep,
            ModeArg::Budget => Mode::Budget,
        }
    }
}

enum CliError {
    Config(String),
    Io(String),
    Sim(SimError),
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        CliError::Config(e.to_string())
    }
}

impl From<io::Error> for CliError {
    fn from(e: io::Error) -> Self {
        CliError::Io(e.to_string())
    }
}

impl From<SimError> for CliError {
    fn from(e: SimError) -> Self {
        CliError::Sim(e)
    }
}

fn main() -> ExitCode {
    let args = Args::parse();
    match run(args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Config(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Sim(e)) => {
            eprintln!("invariant violation: {e}");
            ExitCode::from(3)
        }
    }
}

fn run(args: Args) -> Result<(), CliError> {
    let mut experiment = ExperimentConfig::load(&args.config)?;
    if let Some(seeds) = args.seed_override {
        experiment.run.seeds = seeds;
    }
    experiment.validate()?;

    let mode = args
        .mode
        .map(Mode::from)
        .or(experiment.mode)
        .ok_or_else(|| {
            CliError::Config("no mode: pass --mode or set \"mode\" in the config".to_string())
        })?;

    if args.event_log.is_some() && mode != Mode::Single {
        return Err(CliError::Config(
            "--event-log is only available in single mode".to_string(),
        ));
    }

    let mut out: BufWriter<Box<dyn Write>> = BufWriter::new(match &args.out {
        Some(path) => Box::new(
            File::create(path)
                .map_err(|e| CliError::Io(format!("cannot write {}: {e}", path.display())))?,
        ),
        None => Box::new(io::stdout()),
    });

    match mode {
        Mode::Single => {
            let profiles = experiment.profiles.clone().unwrap_or_else(builtin_profiles);
            if let Some(log_path) = &args.event_log {
                let (summary, logs) = runner::run_single_with_logs(&experiment.run)?;
                let mut log_out = BufWriter::new(File::create(log_path).map_err(|e| {
                    CliError::Io(format!("cannot write {}: {e}", log_path.display()))
                })?);
                runner::write_event_log(&mut log_out, &logs)?;
                log_out.flush()?;
                runner::write_single_csv(&mut out, &experiment.run, &summary, Some(&profiles))?;
            } else {
                let summary = runner::run_single(&experiment.run)?;
                runner::write_single_csv(&mut out, &experiment.run, &summary, Some(&profiles))?;
            }
        }
        Mode::Sweep => {
            let sweep = experiment.sweep.clone().ok_or_else(|| {
                CliError::Config("sweep mode needs a \"sweep\" section".to_string())
            })?;
            let points = runner::run_sweep(&experiment.run, &sweep)?;
            runner::write_sweep_csv(&mut out, &experiment.run, &sweep, &points)?;
        }
        Mode::Budget => {
            let budget = experiment.budget.clone().unwrap_or_default();
            let rows = runner::budget_rows(&budget);
            runner::write_budget_csv(&mut out, &budget, &rows)?;
        }
    }
    out.flush()?;
    Ok(())
}
