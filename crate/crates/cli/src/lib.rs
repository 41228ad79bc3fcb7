//! Command-line front end: analyze, evolve, classify, verify and ensemble.
//!
//! Exit codes: 0 success, 1 usage or input error, 2 numerical failure,
//! 3 verification failure.

// `!(x <= limit)` is the NaN-rejecting form.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

use std::ffi::OsString;
use std::io::Write;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub mod analyze;
pub mod classify;
pub mod config;
pub mod ensemble;
pub mod error;
pub mod evolve;
pub mod output;
pub mod state_spec;
pub mod states;
pub mod verify;

use config::{parse_config, Format, RunConfig};
use error::{CliError, EXIT_OK, EXIT_USAGE};
use state_spec::parse_state_spec;

#[derive(Debug, Parser)]
#[command(name = "freemoments", version, about = "Phase-space moments of free particles")]
pub struct Cli {
    /// TOML run configuration (units, grid, time range, output)
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Output format; overrides the configuration
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Output file; overrides the configuration (default stdout)
    #[arg(long, global = true, value_name = "PATH")]
    pub out: Option<PathBuf>,
    /// Seed for every random draw
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Moments by every available method, invariants, geometry, shape and inequalities
    Analyze {
        /// Family with key=value parameters, or file=<path>
        #[arg(required = true, num_args = 1..)]
        state: Vec<String>,
        /// Highest moment order
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
    /// Moment time series in scaled time u = (t - t0)/m
    Evolve {
        /// Family with key=value parameters, or file=<path>
        #[arg(required = true, num_args = 1..)]
        state: Vec<String>,
        /// Moment order (2, 3 or 4)
        #[arg(long, default_value_t = 3)]
        order: usize,
    },
    /// Critical points and case label of Y0(t)
    Classify {
        /// A state, y=<y0,...,yn> or moments=<json path>
        #[arg(required = true, num_args = 1..)]
        state: Vec<String>,
        /// Classify only this order (3 or 4)
        #[arg(long)]
        order: Option<usize>,
    },
    /// Seeded property sweep; exits 3 if any property fails
    Verify {
        #[arg(value_enum)]
        suite: verify::Suite,
    },
    /// Moments and checks of a classical ensemble (CSV x,p[,m] or `random n=...`)
    Ensemble {
        /// CSV path, or `random` with optional n=, sx=, sp=, rho=
        #[arg(required = true, num_args = 1..)]
        source: Vec<String>,
        /// Highest moment order (2 to 6)
        #[arg(long, default_value_t = 4)]
        order: usize,
    },
}

fn load_config(path: Option<&PathBuf>) -> Result<RunConfig, CliError> {
    match path {
        None => Ok(RunConfig::default()),
        Some(p) => {
            let text = std::fs::read_to_string(p).map_err(|source| CliError::Io {
                path: p.clone(),
                source,
            })?;
            parse_config(&text).map_err(|source| CliError::Config { path: p.clone(), source })
        }
    }
}

/// Runs a parsed command line.
pub fn execute(cli: &Cli) -> Result<(), CliError> {
    let config = load_config(cli.config.as_ref())?;
    let out = cli.out.clone().or_else(|| config.output.path.clone());
    let chosen = cli.format.or(config.output.format);
    let format = chosen.unwrap_or(Format::Json);
    let text = match &cli.command {
        Command::Analyze { state, order } => {
            let spec = parse_state_spec(state, config.length_scale)?;
            output::render(&analyze::analyze(&spec, *order, &config)?, format)
        }
        Command::Evolve { state, order } => {
            let spec = parse_state_spec(state, config.length_scale)?;
            evolve::render(&evolve::evolve(&spec, *order, &config)?, chosen.unwrap_or(Format::Csv))
        }
        Command::Classify { state, order } => {
            let spec = parse_state_spec(state, config.length_scale)?;
            output::render(&classify::classify(&spec, *order, &config)?, format)
        }
        Command::Ensemble { source, order } => {
            output::render(&ensemble::ensemble(source, *order, cli.seed, &config)?, format)
        }
        Command::Verify { suite } => {
            let report = verify::verify(*suite, cli.seed, &config)?;
            // the table always goes to the terminal; the log goes to --out
            let table = verify::table(&report);
            match (&out, chosen) {
                (Some(path), _) => {
                    output::emit(&output::render(&report, format), Some(path))?;
                    output::emit(&table, None)?;
                }
                (None, Some(f)) => output::emit(&output::render(&report, f), None)?,
                (None, None) => output::emit(&table, None)?,
            }
            if !report.passed {
                let failed: Vec<&str> = report.checks.iter().filter(|c| !c.passed).map(|c| c.name).collect();
                return Err(CliError::Verify(failed.join(", ")));
            }
            return Ok(());
        }
    };
    output::emit(&text, out.as_deref())
}

/// Parses arguments, runs, reports errors on stderr and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(&cli) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            let _ = writeln!(std::io::stderr(), "error: {e}");
            e.exit_code()
        }
    }
}
