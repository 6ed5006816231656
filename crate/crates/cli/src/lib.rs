//! `hucert`: solve Volterra problems from config files, certify candidate
//! solutions, check contraction-factor functions and verify kernels.

#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod commands;
pub mod config;

use std::path::{Path, PathBuf};

use clap::{ArgGroup, Args, Parser, Subcommand};
use hyers_ulam::mtfunc::{MtFunc, RegistryEntry};
use hyers_ulam::volterra::{CandidateError, VolterraError};
use thiserror::Error;

use config::{ConfigError, ProblemConfig};

/// Process exit codes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Exit {
    Ok = 0,
    /// Bad input or failed validation.
    Input = 1,
    BudgetExhausted = 2,
    /// A verification found a counterexample.
    CounterExample = 3,
}

impl Exit {
    pub fn code(self) -> u8 {
        self as u8
    }
}

#[derive(Debug)]
pub struct Report {
    pub text: String,
    pub exit: Exit,
}

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("cannot read {path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
    #[error("candidate {path}: {source}")]
    Candidate {
        path: String,
        #[source]
        source: CandidateError,
    },
    #[error(transparent)]
    Volterra(#[from] VolterraError),
    #[error("phi: {0}")]
    Mt(String),
}

#[derive(Debug, Parser)]
#[command(
    name = "hucert",
    version,
    about = "Volterra solver and Hyers-Ulam certifier"
)]
pub struct Cli {
    /// Problem configuration (TOML).
    #[arg(long, global = true, value_name = "PATH")]
    pub config: Option<PathBuf>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "PATH")]
    pub output: Option<PathBuf>,
    /// Print only the machine-readable `key = value` block.
    #[arg(long, global = true)]
    pub machine: bool,
    /// Override the sampling seed from the config.
    #[arg(long, global = true, value_name = "N")]
    pub seed: Option<u64>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Successive approximation from the zero function.
    Solve,
    /// Residual and stability bound of a tabulated candidate.
    Certify {
        /// Candidate table: `x, re[, im]` per grid node.
        candidate: PathBuf,
    },
    /// Sampled MT-function batteries for a phi.
    CheckMt(PhiArgs),
    /// Sampled check of the kernel's phi-Lipschitz condition.
    VerifyKernel,
}

/// Where check-mt takes its phi from; defaults to the `phi` of `--config`.
#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").multiple(false)))]
pub struct PhiArgs {
    /// TOML file with a `phi = {...}` entry.
    #[arg(long, value_name = "PATH", group = "source")]
    pub phi: Option<PathBuf>,
    #[arg(long, value_name = "L", group = "source")]
    pub constant: Option<f64>,
    /// Comma-separated breakpoints of a step table (needs --values and --sup-cap).
    #[arg(
        long,
        value_delimiter = ',',
        group = "source",
        requires_all = ["values", "sup_cap"],
        allow_negative_numbers = true
    )]
    pub breakpoints: Option<Vec<f64>>,
    #[arg(
        long,
        value_delimiter = ',',
        requires = "breakpoints",
        allow_negative_numbers = true
    )]
    pub values: Option<Vec<f64>>,
    #[arg(long, requires = "breakpoints")]
    pub sup_cap: Option<f64>,
    /// Named closed form, e.g. one-minus-s.
    #[arg(long, value_name = "NAME", group = "source")]
    pub registry: Option<String>,
}

fn require_config(cli: &Cli) -> Result<ProblemConfig, CliError> {
    let path = cli
        .config
        .as_deref()
        .ok_or_else(|| CliError::Usage("this command needs --config PATH".into()))?;
    Ok(ProblemConfig::load(path)?)
}

fn phi_from(args: &PhiArgs, config: Option<&Path>) -> Result<MtFunc, CliError> {
    let mt = |e: hyers_ulam::mtfunc::MtError| CliError::Mt(e.to_string());
    if let Some(path) = &args.phi {
        return Ok(config::load_phi(path)?);
    }
    if let Some(level) = args.constant {
        return MtFunc::constant(level).map_err(mt);
    }
    if let Some(bps) = &args.breakpoints {
        let values = args.values.clone().expect("clap requires --values");
        let cap = args.sup_cap.expect("clap requires --sup-cap");
        return MtFunc::table(bps.clone(), values, cap).map_err(mt);
    }
    if let Some(name) = &args.registry {
        return RegistryEntry::from_name(name)
            .map(MtFunc::registry)
            .ok_or_else(|| CliError::Mt(format!("unknown registry function '{name}'")));
    }
    match config {
        Some(path) => Ok(config::load_phi(path)?),
        None => Err(CliError::Usage(
            "check-mt needs --phi, --constant, --breakpoints/--values/--sup-cap, --registry or --config".into(),
        )),
    }
}

/// Runs one command and returns its report; errors map to exit code 1.
pub fn execute(cli: &Cli) -> Result<Report, CliError> {
    match &cli.command {
        Command::Solve => commands::solve_cmd(&require_config(cli)?, cli.machine),
        Command::Certify { candidate } => {
            let cfg = require_config(cli)?;
            let seed = cli.seed.unwrap_or(cfg.seed);
            commands::certify_cmd(&cfg, candidate, seed, cli.machine)
        }
        Command::VerifyKernel => {
            let cfg = require_config(cli)?;
            let seed = cli.seed.unwrap_or(cfg.seed);
            commands::verify_kernel_cmd(&cfg, seed, cli.machine)
        }
        Command::CheckMt(args) => {
            let phi = phi_from(args, cli.config.as_deref())?;
            commands::check_mt_cmd(&phi, cli.seed.unwrap_or(0), cli.machine)
        }
    }
}

/// Executes and writes the report; returns the process exit code.
pub fn run(cli: &Cli) -> u8 {
    let report = match execute(cli) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: {e}");
            return Exit::Input.code();
        }
    };
    let written = match &cli.output {
        Some(path) => std::fs::write(path, &report.text)
            .map_err(|e| format!("cannot write {}: {e}", path.display())),
        None => {
            print!("{}", report.text);
            Ok(())
        }
    };
    if let Err(msg) = written {
        eprintln!("error: {msg}");
        return Exit::Input.code();
    }
    report.exit.code()
}
