//! Batch front-end: config parsing, subcommand dispatch, reproducible CSV and
//! manifest outputs.
//!
//! Exit codes: 0 success, 1 scientific check failure, 2 configuration or
//! runtime error. `MFNLS_OUT` overrides the configured output directory.

mod config;
mod dispatch;
mod manifest;

use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand as ClapSubcommand};

use config::{parse_config, RunConfig, Subcommand};
use manifest::{CheckEntry, Manifest};

#[derive(Parser)]
#[command(
    name = "mfnls",
    version,
    about = "Pseudospectral workbench comparing the cubic NLS with its Hartree-type regularization"
)]
struct Cli {
    /// Run the full acceptance suite (same as the `check` subcommand).
    #[arg(long, global = true)]
    check: bool,
    #[command(subcommand)]
    command: Option<Command>,
}

#[derive(ClapSubcommand)]
enum Command {
    /// Integrate one flow and emit conservation diagnostics.
    Solve { config: Option<PathBuf> },
    /// Run the paired flows at one N and emit the H^1 difference trace.
    Compare { config: Option<PathBuf> },
    /// Dyadic-N comparison-rate sweep with log-log slope fit.
    Sweep { config: Option<PathBuf> },
    /// Frequency-slab lower-bound witness sweep.
    Resonance { config: Option<PathBuf> },
    /// Exact collapse-map counting table.
    Boardgame { config: Option<PathBuf> },
    /// Hierarchy master-norm difference along a paired run.
    Hierarchy { config: Option<PathBuf> },
    /// Deviation-operator decay rate from the analytic multiplier.
    Convrate { config: Option<PathBuf> },
    /// Full acceptance suite.
    Check { config: Option<PathBuf> },
}

impl Command {
    fn split(&self) -> (Subcommand, Option<&PathBuf>) {
        match self {
            Command::Solve { config } => (Subcommand::Solve, config.as_ref()),
            Command::Compare { config } => (Subcommand::Compare, config.as_ref()),
            Command::Sweep { config } => (Subcommand::Sweep, config.as_ref()),
            Command::Resonance { config } => (Subcommand::Resonance, config.as_ref()),
            Command::Boardgame { config } => (Subcommand::Boardgame, config.as_ref()),
            Command::Hierarchy { config } => (Subcommand::Hierarchy, config.as_ref()),
            Command::Convrate { config } => (Subcommand::Convrate, config.as_ref()),
            Command::Check { config } => (Subcommand::Check, config.as_ref()),
        }
    }
}

fn out_dir(cfg: Option<&RunConfig>) -> PathBuf {
    if let Ok(dir) = std::env::var("MFNLS_OUT") {
        if !dir.is_empty() {
            return PathBuf::from(dir);
        }
    }
    PathBuf::from(cfg.map_or("out", |c| c.output.directory.as_str()))
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let start = Instant::now();

    let (sub, config_path) = match (&cli.command, cli.check) {
        (_, true) => (Subcommand::Check, None),
        (Some(cmd), false) => cmd.split(),
        (None, false) => {
            eprintln!("error: a subcommand is required (try `mfnls check` or `mfnls --help`)");
            return ExitCode::from(2);
        }
    };

    let text = match config_path {
        Some(p) => match std::fs::read_to_string(p) {
            Ok(t) => t,
            Err(e) => {
                eprintln!("error: cannot read config {}: {e}", p.display());
                let m = Manifest {
                    tool: "mfnls",
                    version: env!("CARGO_PKG_VERSION"),
                    subcommand: sub.name(),
                    seed: 0,
                    config: None,
                    outputs: vec![],
                    checks: vec![],
                    pass: false,
                    error: Some(format!("cannot read config: {e}")),
                    wall_time_s: start.elapsed().as_secs_f64(),
                };
                let _ = m.write(&out_dir(None));
                return ExitCode::from(2);
            }
        },
        None => String::new(),
    };

    let cfg = match parse_config(&text, sub) {
        Ok(cfg) => cfg,
        Err(errors) => {
            eprintln!("configuration invalid ({} problems):", errors.len());
            for e in &errors {
                eprintln!("  - {e}");
            }
            let m = Manifest {
                tool: "mfnls",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: sub.name(),
                seed: 0,
                config: None,
                outputs: vec![],
                checks: vec![],
                pass: false,
                error: Some(errors.join("; ")),
                wall_time_s: start.elapsed().as_secs_f64(),
            };
            let _ = m.write(&out_dir(None));
            return ExitCode::from(2);
        }
    };

    let dir = out_dir(Some(&cfg));
    match dispatch::run(sub, &cfg) {
        Ok(outcome) => {
            if !outcome.stdout.is_empty() {
                print!("{}", outcome.stdout);
            }
            let outputs = match dispatch::write_files(&dir, &outcome.files) {
                Ok(o) => o,
                Err(e) => {
                    eprintln!("error: writing outputs failed: {e}");
                    return ExitCode::from(2);
                }
            };
            for c in &outcome.checks {
                println!(
                    "[{}] {}: {}",
                    if c.pass { "PASS" } else { "FAIL" },
                    c.name,
                    c.detail
                );
            }
            let m = Manifest {
                tool: "mfnls",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: sub.name(),
                seed: cfg.data.seed,
                config: Some(&cfg),
                outputs,
                checks: outcome.checks.clone(),
                pass: outcome.pass,
                error: None,
                wall_time_s: start.elapsed().as_secs_f64(),
            };
            if let Err(e) = m.write(&dir) {
                eprintln!("error: writing manifest failed: {e}");
                return ExitCode::from(2);
            }
            if outcome.pass {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            let scientific = dispatch::is_scientific_failure(&e);
            let m = Manifest {
                tool: "mfnls",
                version: env!("CARGO_PKG_VERSION"),
                subcommand: sub.name(),
                seed: cfg.data.seed,
                config: Some(&cfg),
                outputs: vec![],
                checks: vec![CheckEntry {
                    name: "run".into(),
                    pass: false,
                    detail: e.to_string(),
                }],
                pass: false,
                error: Some(e.to_string()),
                wall_time_s: start.elapsed().as_secs_f64(),
            };
            let _ = m.write(&dir);
            ExitCode::from(if scientific { 1 } else { 2 })
        }
    }
}
