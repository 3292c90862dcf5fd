//! `contactlab`: run contact-geometry experiments from a TOML config.

mod commands;
mod config;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use contactlab::ContactError;
use config::ExperimentConfig;
use report::{Recorder, RunReport};

#[derive(Parser)]
#[command(name = "contactlab", version, about = "Contact Hamiltonian experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// TOML experiment config; defaults apply to anything left out.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Output directory for reports and the table CSV.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Replace the headline tolerance of every check.
    #[arg(long, global = true)]
    tol: Option<f64>,
}

#[derive(Subcommand, Clone, Copy, PartialEq, Eq)]
enum Command {
    /// Coisotropy and Legendrian verdicts on the fixtures.
    Coisotropy,
    /// Contact bracket identities, naturality and the vanishing ideal.
    Brackets,
    /// Closed-form fields, conformal factors and integrator order.
    Flows,
    /// Symplectization and prequantization correspondences.
    Lifts,
    /// Cost functionals, the non-comparability table and the circle.
    Norms,
    /// Every command in turn.
    All,
}

impl Command {
    fn name(self) -> &'static str {
        match self {
            Command::Coisotropy => "coisotropy",
            Command::Brackets => "brackets",
            Command::Flows => "flows",
            Command::Lifts => "lifts",
            Command::Norms => "norms",
            Command::All => "all",
        }
    }

    fn run(self, cfg: &ExperimentConfig) -> contactlab::Result<RunReport> {
        match self {
            Command::Coisotropy => commands::coisotropy::run(cfg),
            Command::Brackets => commands::brackets::run(cfg),
            Command::Flows => commands::flows::run(cfg),
            Command::Lifts => commands::lifts::run(cfg),
            Command::Norms => commands::norms::run(cfg),
            Command::All => {
                let mut rec = Recorder::new("all");
                for c in [Command::Coisotropy, Command::Brackets, Command::Flows, Command::Lifts, Command::Norms] {
                    println!("== {}", c.name());
                    rec.absorb(c.run(cfg)?);
                }
                Ok(rec.finish(cfg))
            }
        }
    }
}

fn input_error(msg: impl std::fmt::Display) -> ExitCode {
    eprintln!("error: {msg}");
    ExitCode::from(2)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let mut cfg = match &cli.config {
        Some(path) => match ExperimentConfig::load(path) {
            Ok(c) => c,
            Err(e) => return input_error(e),
        },
        None => ExperimentConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.seed = seed;
    }
    if let Some(out) = &cli.out {
        cfg.output.dir = out.display().to_string();
    }
    if let Some(tol) = cli.tol {
        if !(tol > 0.0 && tol.is_finite()) {
            return input_error(format!("--tol must be positive, got {tol}"));
        }
        cfg.override_tol(tol);
    }
    if let Ok(v) = std::env::var("CONTACTLAB_THREADS") {
        match v.parse::<usize>() {
            Ok(n) if n > 0 => {
                if let Err(e) = rayon::ThreadPoolBuilder::new().num_threads(n).build_global() {
                    eprintln!("warning: thread pool: {e}");
                }
            }
            _ => return input_error(format!("CONTACTLAB_THREADS must be a positive integer, got `{v}`")),
        }
    }

    println!("contactlab {} (seed {})", cli.command.name(), cfg.seed);
    let report = match cli.command.run(&cfg) {
        Ok(r) => r,
        Err(e @ (ContactError::Input(_) | ContactError::DimensionMismatch { .. } | ContactError::UnsupportedForm { .. })) => {
            return input_error(e)
        }
        Err(e) => {
            eprintln!("error: {e}");
            return ExitCode::from(1);
        }
    };
    match report.write_json(std::path::Path::new(&cfg.output.dir)) {
        Ok(path) => println!("report written to {}", path.display()),
        Err(e) => {
            eprintln!("error: {e:#}");
            return ExitCode::from(1);
        }
    }
    let failed = report.checks.iter().filter(|c| !c.pass).count();
    println!("{} checks, {} failed: {}", report.checks.len(), failed, if report.pass { "PASS" } else { "FAIL" });
    if report.pass {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}
