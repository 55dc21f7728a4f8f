//! `qexch`: exact verification and desk-scale simulation for multi-species
//! interacting-particle-system Hamiltonians.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for
//! usage or configuration errors.

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

mod config;
mod export;
mod opfile;
mod report;
mod sim;
mod suites;

use config::ModelConfig;

#[derive(Parser)]
#[command(name = "qexch", version, about = "exact verification and simulation of q-deformed lattice models")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a verification suite and print its report
    Verify {
        /// one of: assumptions, theorem1, groundstate, gauge-ybe, algebra, hecke
        suite: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Simulate the transformed generator and compare against the exact measure
    Simulate {
        #[command(flatten)]
        opts: CommonOpts,
    },
    /// Write a deterministic artifact file
    Export {
        /// one of: operator, eigenvector, generator
        what: String,
        #[command(flatten)]
        opts: CommonOpts,
    },
}

#[derive(Args)]
struct CommonOpts {
    /// flat key-value config file; flags override its entries
    #[arg(long)]
    config: Option<PathBuf>,
    /// local Hamiltonian source: `asep` or `file:<path>`
    #[arg(long)]
    model: Option<String>,
    /// number of species
    #[arg(long)]
    n: Option<String>,
    /// particles per site
    #[arg(long = "J")]
    j: Option<String>,
    /// weight exponent coefficient
    #[arg(long)]
    c: Option<String>,
    /// number of lattice sites
    #[arg(long = "L")]
    l: Option<String>,
    /// comma-separated evaluation points for q
    #[arg(long)]
    q0: Option<String>,
    /// number of jump events to simulate
    #[arg(long)]
    events: Option<String>,
    /// RNG seed
    #[arg(long)]
    seed: Option<String>,
    /// R-matrix variant: `corrected` or `paper-literal`
    #[arg(long)]
    variant: Option<String>,
    /// per-leg dimension for R-matrix suites
    #[arg(long)]
    d: Option<String>,
    /// conservation sector, comma-separated counts
    #[arg(long)]
    sector: Option<String>,
    /// fraction of leading events discarded as burn-in
    #[arg(long)]
    burn_in: Option<String>,
    /// initial state index within the sector
    #[arg(long)]
    x0: Option<String>,
    /// write output here instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// include wall-clock runtime in the report (breaks byte determinism)
    #[arg(long)]
    timings: bool,
}

impl CommonOpts {
    fn build_config(&self) -> Result<ModelConfig, config::ConfigError> {
        let mut cfg = match &self.config {
            Some(path) => ModelConfig::from_file(path)?,
            None => ModelConfig::default(),
        };
        let overrides: [(&str, &Option<String>); 13] = [
            ("model", &self.model),
            ("n", &self.n),
            ("J", &self.j),
            ("c", &self.c),
            ("L", &self.l),
            ("q0", &self.q0),
            ("events", &self.events),
            ("seed", &self.seed),
            ("variant", &self.variant),
            ("d", &self.d),
            ("sector", &self.sector),
            ("burn_in", &self.burn_in),
            ("x0", &self.x0),
        ];
        for (key, value) in overrides {
            if let Some(v) = value {
                cfg.set(key, v)?;
            }
        }
        cfg.validate()?;
        Ok(cfg)
    }

    fn emit(&self, text: &str) -> std::io::Result<()> {
        match &self.out {
            Some(path) => std::fs::write(path, text),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

const EXIT_CHECK_FAILED: u8 = 1;
const EXIT_USAGE: u8 = 2;

fn usage_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("qexch: {msg}");
    ExitCode::from(EXIT_USAGE)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match cli.command {
        Command::Verify { suite, opts } => {
            let cfg = match opts.build_config() {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            };
            let start = Instant::now();
            let mut report = match suites::run_suite(&suite, &cfg) {
                Ok(r) => r,
                Err(e) => return usage_error(e),
            };
            if opts.timings {
                report.runtime_ms = Some(start.elapsed().as_millis());
            }
            if let Err(e) = opts.emit(&report.to_json()) {
                return usage_error(e);
            }
            if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(EXIT_CHECK_FAILED)
            }
        }
        Command::Simulate { opts } => {
            let cfg = match opts.build_config() {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            };
            match sim::cmd_simulate(&cfg) {
                Ok(report) => match opts.emit(&report.to_json()) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => usage_error(e),
                },
                Err(sim::SimCmdError::Suite(e)) => usage_error(e),
                Err(sim::SimCmdError::Check(msg)) => {
                    eprintln!("qexch: check failed: {msg}");
                    ExitCode::from(EXIT_CHECK_FAILED)
                }
            }
        }
        Command::Export { what, opts } => {
            let cfg = match opts.build_config() {
                Ok(c) => c,
                Err(e) => return usage_error(e),
            };
            match export::cmd_export(&what, &cfg) {
                Ok(text) => match opts.emit(&text) {
                    Ok(()) => ExitCode::SUCCESS,
                    Err(e) => usage_error(e),
                },
                Err(e) => usage_error(e),
            }
        }
    }
}
