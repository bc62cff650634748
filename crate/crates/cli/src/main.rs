//! `cbop`: moment export, verification suites, lattice integration and the
//! quadrature oracle, driven by a TOML run file.

mod commands;
mod config;
mod error;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use config::{ModeName, RunConfig, Suite};
use error::CliResult;

#[derive(Parser)]
#[command(name = "cbop", version, about = "Cauchy bi-orthogonal polynomials and their lattice")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: PathBuf,
    /// Decimal digits for real arithmetic.
    #[arg(long)]
    precision: Option<u32>,
    #[arg(long, value_enum)]
    mode: Option<ModeName>,
    /// Output directory.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl Common {
    fn load(self) -> CliResult<RunConfig> {
        RunConfig::load(&self.config)?.with_overrides(self.mode, self.precision, self.out)
    }
}

#[derive(Subcommand)]
enum Command {
    /// Export the moment table and check that it reads back exactly.
    Moments(Common),
    /// Run the residual suites.
    Verify {
        #[command(flatten)]
        common: Common,
        /// Perturb one bi-moment; every identity reading it should fail.
        #[arg(long)]
        inject_fault: bool,
        /// Replace the configured suite list.
        #[arg(long = "suite", value_enum)]
        suites: Vec<Suite>,
    },
    /// Integrate the nonlinear lattice.
    Evolve(Common),
    /// Compare multiple integrals against determinants.
    Oracle(Common),
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Moments(c) => commands::moments::run(&c.load()?),
        Command::Verify { common, inject_fault, suites } => {
            let mut cfg = common.load()?;
            if !suites.is_empty() {
                cfg.run.suites = suites;
            }
            commands::verify::run(&cfg, inject_fault).map(|_| ())
        }
        Command::Evolve(c) => commands::evolve::run(&c.load()?),
        Command::Oracle(c) => commands::oracle::run(&c.load()?).map(|_| ()),
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    match run(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            e.exit_code()
        }
    }
}
