//! `nsac`: run, audit and verify 1-D Navier–Stokes/Allen–Cahn simulations.
//!
//! Exit codes: 0 success, 1 a checked invariant failed (or a run aborted),
//! 2 usage, config or I/O error.

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Parser, Subcommand};
use nsac_core::io::series::convergence_text;
use nsac_core::io::{
    audit_records, parse_config, read_diagnostics, run_simulation, write_convergence, IoError,
    RunConfig,
};
use nsac_core::{bracket_roots, convergence_study, ManufacturedCase};

const MMS_ORDER_SMOOTH: f64 = 1.9;
const MMS_ORDER_PHASE: f64 = 1.5;

#[derive(Parser)]
#[command(
    name = "nsac",
    version,
    about = "1-D compressible Navier-Stokes/Allen-Cahn simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate and write snapshots, diagnostics and a plot script.
    Run { config: PathBuf },
    /// Re-check the invariants recorded in a diagnostics CSV.
    Audit { diagnostics: PathBuf },
    /// Manufactured-solution convergence study.
    Mms { config: PathBuf },
    /// Print the roots α₁ ≤ 1 ≤ α₂ of y - ln y - 1 = e0.
    Brackets {
        #[arg(allow_negative_numbers = true)]
        e0: f64,
    },
}

enum Outcome {
    Ok,
    Failed,
}

fn load_config(path: &Path) -> Result<RunConfig> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    parse_config(&text).with_context(|| format!("in {}", path.display()))
}

fn cmd_run(path: &Path) -> Result<Outcome> {
    let cfg = load_config(path)?;
    match run_simulation(&cfg) {
        Ok(summary) => {
            let report = audit_records(&summary.records);
            println!(
                "reached t = {} in {} steps; output in {}",
                summary.final_time,
                summary.steps,
                summary.output_dir.display()
            );
            print!("{report}");
            Ok(if report.passed() {
                Outcome::Ok
            } else {
                Outcome::Failed
            })
        }
        Err(e @ IoError::Aborted { .. }) => {
            eprintln!("run aborted: {e}");
            Ok(Outcome::Failed)
        }
        Err(e) => Err(e.into()),
    }
}

fn cmd_audit(path: &Path) -> Result<Outcome> {
    let records = read_diagnostics(path)?;
    let report = audit_records(&records);
    print!("{report}");
    for c in report.failures() {
        eprintln!("violated: {}", c.name);
    }
    Ok(if report.passed() {
        Outcome::Ok
    } else {
        Outcome::Failed
    })
}

fn cmd_mms(path: &Path) -> Result<Outcome> {
    let cfg = load_config(path)?;
    let case = ManufacturedCase {
        amplitude: cfg.mms_amplitude,
        interface: true,
        half_width: cfg.half_width,
        params: cfg.params,
        t_final: cfg.mms_t_final,
    };
    let table = convergence_study(&case, &cfg.mms_resolutions)?;
    fs::create_dir_all(&cfg.output_dir)
        .with_context(|| format!("creating {}", cfg.output_dir.display()))?;
    write_convergence(&table, &cfg.output_dir.join("convergence.csv"))?;
    print!("{}", convergence_text(&table));
    let ok = table
        .rows
        .iter()
        .filter_map(|r| r.orders)
        .all(|o| o[..3].iter().all(|&x| x >= MMS_ORDER_SMOOTH) && o[3] >= MMS_ORDER_PHASE);
    if !ok {
        eprintln!(
            "observed order below {MMS_ORDER_SMOOTH} (v, u, theta) or {MMS_ORDER_PHASE} (phi)"
        );
    }
    Ok(if ok { Outcome::Ok } else { Outcome::Failed })
}

fn cmd_brackets(e0: f64) -> Result<Outcome> {
    let (a1, a2) = bracket_roots(e0)?;
    println!("{a1} {a2}");
    Ok(Outcome::Ok)
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(if e.use_stderr() { 2 } else { 0 });
        }
    };
    let result = match &cli.command {
        Command::Run { config } => cmd_run(config),
        Command::Audit { diagnostics } => cmd_audit(diagnostics),
        Command::Mms { config } => cmd_mms(config),
        Command::Brackets { e0 } => cmd_brackets(*e0),
    };
    match result {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
