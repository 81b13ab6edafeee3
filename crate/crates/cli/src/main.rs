//! Command-line driver for propagation runs and closed-form tabulations.
//!
//! Exit codes: 0 success, 1 configuration or I/O error, 2 numerical abort.

mod commands;
mod config;
mod output;

use clap::{Parser, Subcommand};
use std::path::PathBuf;
use std::process::ExitCode;

use commands::{Field, FitObservable, Vary};

#[derive(Debug)]
pub enum CliError {
    Config(String),
    Io(String),
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Config(_) | CliError::Io(_) => 1,
            CliError::Numerical(_) => 2,
        }
    }

    pub fn label(&self) -> &'static str {
        match self {
            CliError::Config(_) => "config_error",
            CliError::Io(_) => "io_error",
            CliError::Numerical(_) => "numerical_abort",
        }
    }
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Config(m) => write!(f, "configuration error: {m}"),
            CliError::Io(m) => write!(f, "i/o error: {m}"),
            CliError::Numerical(m) => write!(f, "numerical abort: {m}"),
        }
    }
}

impl From<mixonium::Error> for CliError {
    fn from(e: mixonium::Error) -> Self {
        use mixonium::Error as E;
        match e {
            E::Step(_) | E::Instability { .. } | E::ComplexInput { .. } | E::DegenerateField { .. } => {
                CliError::Numerical(e.to_string())
            }
            _ => CliError::Config(e.to_string()),
        }
    }
}

#[derive(Parser)]
#[command(name = "mixonium", version, about = "Two-pulse propagation in partially coherent lambda media")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Propagate the configured input pulses through the medium.
    Simulate {
        /// TOML configuration, or a manifest.json from an earlier run.
        config: PathBuf,
        /// Output directory, overriding the configured one.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Tabulate the closed-form solutions on the configured grid.
    Analytic {
        config: PathBuf,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Per-snapshot areas, matching metric and regime of a finished run.
    Areas { dir: PathBuf },
    /// Fit group velocity or weak-pulse decay over a run's snapshots.
    Fit {
        dir: PathBuf,
        #[arg(long, value_enum)]
        observable: FitObservable,
        #[arg(long, value_enum, default_value = "total")]
        field: Field,
        /// Smallest absorption depth κZ included.
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        /// Largest absorption depth κZ included.
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
    },
    /// Run one scenario per parameter value, concurrently.
    Sweep {
        config: PathBuf,
        /// `key=start:stop:step`; keys are `section.name` or a bare preparation/medium name.
        #[arg(long)]
        vary: Vary,
        /// Tabulate analytic solutions instead of propagating.
        #[arg(long)]
        analytic: bool,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

fn run(cli: Cli) -> Result<(), CliError> {
    match cli.command {
        Command::Simulate { config, out } => {
            let cfg = config::load(&config)?;
            let dir = commands::simulate(&cfg, out.as_deref())?;
            println!("{}", dir.display());
        }
        Command::Analytic { config, out } => {
            let cfg = config::load(&config)?;
            let dir = commands::analytic(&cfg, out.as_deref())?;
            println!("{}", dir.display());
        }
        Command::Areas { dir } => {
            println!("{}", commands::areas(&dir)?.display());
        }
        Command::Fit { dir, observable, field, from, to } => {
            let (_, value) = commands::fit(&dir, observable, field, from, to)?;
            println!("{}", serde_json::to_string_pretty(&value).unwrap_or_default());
        }
        Command::Sweep { config, vary, analytic, out } => {
            let cfg = config::load(&config)?;
            println!("{}", commands::sweep(&cfg, &vary, analytic, out.as_deref())?.display());
        }
    }
    Ok(())
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("mixonium: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
