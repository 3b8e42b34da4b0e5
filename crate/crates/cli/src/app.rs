//! Command-line front end.

use std::fs;
use std::io::{self, Write};
use std::path::PathBuf;

use clap::{Parser, Subcommand};

use crate::alpha_scan::{alpha_scan, write_scan, Mode, ScanError, ScanSettings};
use crate::config::{parse_config, parse_csv_header, ConfigError, Engines, RunConfig};
use crate::csv::{write_metadata, write_rows};
use crate::figures::{figure, FigureId, Overrides};
use crate::run::{run_jobs, sweep_jobs, Row};
use crate::validate::{check_grid, regression_grid, write_report, ValidateError};

pub const EXIT_OK: u8 = 0;
pub const EXIT_CONFIG: u8 = 1;
pub const EXIT_NONCONVERGENCE: u8 = 2;
pub const EXIT_VALIDATION: u8 = 3;

#[derive(Debug, Parser)]
#[command(
    name = "ehcr",
    version,
    about = "Outage and throughput of energy-harvesting cognitive relay networks"
)]
pub struct Cli {
    /// `key = value` configuration file, or a CSV written by `sweep`.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output file (standard output when absent).
    #[arg(long, global = true)]
    pub output: Option<PathBuf>,
    /// Monte Carlo trials.
    #[arg(long, global = true)]
    pub trials: Option<u64>,
    /// Monte Carlo base seed.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Relative quadrature tolerance.
    #[arg(long, global = true)]
    pub tol: Option<f64>,
    /// Comma-separated subset of exact,asymptotic,montecarlo.
    #[arg(long, global = true, value_parser = parse_engines)]
    pub engines: Option<Engines>,
    /// Worker threads (defaults to one per core).
    #[arg(long, global = true)]
    pub workers: Option<usize>,
    #[command(subcommand)]
    pub command: Command,
}

fn parse_engines(s: &str) -> Result<Engines, String> {
    s.parse()
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate the configured point.
    Eval,
    /// Evaluate the configured sweep.
    Sweep,
    /// Run a built-in figure configuration (fig3 .. fig9).
    Figure { id: String },
    /// Compare exact and simulated outage on the 30-point regression grid.
    Validate,
    /// Grid search of the harvesting fraction maximizing throughput.
    AlphaScan {
        /// ds (delay-sensitive) or dt (delay-tolerant).
        #[arg(long, default_value = "dt")]
        mode: Mode,
        #[arg(long, default_value_t = 0.05)]
        alpha_min: f64,
        #[arg(long, default_value_t = 0.95)]
        alpha_max: f64,
        #[arg(long, default_value_t = 19)]
        steps: usize,
        /// Refine the grid maximum by golden-section search.
        #[arg(long)]
        refine: bool,
    },
}

#[derive(Debug)]
pub enum AppError {
    Config(ConfigError),
    Numerical(String),
    Validation(usize),
    Io(io::Error),
}

impl AppError {
    pub fn exit_code(&self) -> u8 {
        match self {
            Self::Config(_) | Self::Io(_) => EXIT_CONFIG,
            Self::Numerical(_) => EXIT_NONCONVERGENCE,
            Self::Validation(_) => EXIT_VALIDATION,
        }
    }
}

impl std::fmt::Display for AppError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Self::Config(e) => write!(f, "configuration error: {e}"),
            Self::Numerical(e) => write!(f, "numerical failure: {e}"),
            Self::Validation(n) => write!(f, "validation failed at {n} point(s)"),
            Self::Io(e) => write!(f, "i/o error: {e}"),
        }
    }
}

impl From<ConfigError> for AppError {
    fn from(e: ConfigError) -> Self {
        Self::Config(e)
    }
}

impl From<io::Error> for AppError {
    fn from(e: io::Error) -> Self {
        Self::Io(e)
    }
}

impl From<ValidateError> for AppError {
    fn from(e: ValidateError) -> Self {
        match e {
            ValidateError::Config(c) => Self::Config(c),
            ValidateError::Numerical(n) => Self::Numerical(n.to_string()),
        }
    }
}

impl From<ScanError> for AppError {
    fn from(e: ScanError) -> Self {
        match e {
            ScanError::Config(c) => Self::Config(c),
            ScanError::Numerical(n) => Self::Numerical(n.to_string()),
        }
    }
}

impl Cli {
    fn overrides(&self) -> Overrides {
        Overrides {
            trials: self.trials,
            seed: self.seed,
            rel_tol: self.tol,
            engines: self.engines,
            path_loss_exponent: None,
        }
    }

    fn load_config(&self) -> Result<Option<RunConfig>, AppError> {
        let Some(path) = &self.config else {
            return Ok(None);
        };
        let text = fs::read_to_string(path)
            .map_err(|e| ConfigError::new(format!("cannot read {}: {e}", path.display())))?;
        let parsed = if path.extension().is_some_and(|x| x == "csv") {
            parse_csv_header(&text)
        } else {
            parse_config(&text)
        };
        parsed
            .map(Some)
            .map_err(|e| ConfigError::new(format!("{}: {e}", path.display())).into())
    }

    /// The configuration file with command-line flags applied on top.
    fn required_config(&self) -> Result<RunConfig, AppError> {
        let mut c = self
            .load_config()?
            .ok_or_else(|| ConfigError::new("this command needs --config <path>"))?;
        self.overrides().apply(&mut c);
        Ok(c)
    }

    /// Preset overrides; a configuration file only contributes its exponent.
    fn preset_overrides(&self) -> Result<Overrides, AppError> {
        let mut o = self.overrides();
        o.path_loss_exponent = self.load_config()?.map(|c| c.path_loss_exponent);
        Ok(o)
    }
}

fn numeric_failure(rows: &[Row]) -> Result<(), AppError> {
    match rows.iter().find(|r| !r.errors.is_empty()) {
        Some(r) => Err(AppError::Numerical(r.errors.join("; "))),
        None => Ok(()),
    }
}

fn execute(cli: &Cli, out: &mut Vec<u8>) -> Result<(), AppError> {
    match &cli.command {
        Command::Eval => {
            let mut c = cli.required_config()?;
            c.sweep = None;
            let rows = run_jobs(&sweep_jobs("", &c)?)?;
            write_metadata(out, "ehcr eval", &c.to_lines())?;
            write_rows(out, "point", &rows)?;
            numeric_failure(&rows)
        }
        Command::Sweep => {
            let c = cli.required_config()?;
            let axis = c
                .sweep
                .as_ref()
                .ok_or_else(|| ConfigError::new("configuration has no sweep_variable"))?;
            let rows = run_jobs(&sweep_jobs("", &c)?)?;
            write_metadata(out, "ehcr sweep", &c.to_lines())?;
            write_rows(out, axis.variable.name(), &rows)?;
            numeric_failure(&rows)
        }
        Command::Figure { id } => {
            let id: FigureId = id.parse()?;
            let fig = figure(id, &cli.preset_overrides()?);
            let rows = run_jobs(&fig.jobs()?)?;
            let mut meta = vec![("figure".to_string(), format!("{id}: {}", id.description()))];
            for c in &fig.curves {
                let line: Vec<String> = c
                    .config
                    .to_lines()
                    .into_iter()
                    .map(|(k, v)| format!("{k}={v}"))
                    .collect();
                meta.push((format!("curve {}", c.id), line.join(" ")));
            }
            write_metadata(out, "ehcr figure", &meta)?;
            write_rows(out, fig.variable.name(), &rows)?;
            numeric_failure(&rows)
        }
        Command::Validate => {
            let grid = regression_grid(&cli.preset_overrides()?);
            let rows = check_grid(&grid)?;
            write_report(out, &rows)?;
            let failures = rows.iter().filter(|r| !r.pass).count();
            if failures > 0 {
                return Err(AppError::Validation(failures));
            }
            Ok(())
        }
        Command::AlphaScan {
            mode,
            alpha_min,
            alpha_max,
            steps,
            refine,
        } => {
            let c = cli.required_config()?;
            let s = ScanSettings {
                mode: *mode,
                min: *alpha_min,
                max: *alpha_max,
                steps: *steps,
                refine: *refine,
            };
            let scan = alpha_scan(&c, &s)?;
            write_scan(out, &c, &s, &scan)?;
            Ok(())
        }
    }
}

/// Runs a parsed command line and returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let result = (|| -> Result<(), AppError> {
        let mut buffer = Vec::new();
        let outcome = match cli.workers {
            Some(0) => return Err(ConfigError::new("--workers must be at least 1").into()),
            Some(n) => rayon::ThreadPoolBuilder::new()
                .num_threads(n)
                .build()
                .map_err(|e| ConfigError::new(format!("cannot start {n} workers: {e}")))?
                .install(|| execute(cli, &mut buffer)),
            None => execute(cli, &mut buffer),
        };
        // Whatever was produced is written even when the run reports a failure.
        match &cli.output {
            Some(path) => fs::write(path, &buffer)?,
            None => io::stdout().lock().write_all(&buffer)?,
        }
        outcome
    })();
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("ehcr: {e}");
            e.exit_code()
        }
    }
}
