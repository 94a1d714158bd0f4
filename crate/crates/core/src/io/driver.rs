//! Runs a configured simulation and writes its outputs:
//!
//! ```text
//! <output_dir>/config.txt          effective configuration
//! <output_dir>/diagnostics.csv     diagnostics time series
//! <output_dir>/snapshots/*.csv     field snapshots + index.csv (step, t, file)
//! <output_dir>/plot.py             plotting script for the above
//! ```
//!
//! Snapshots go through a bounded channel to a writer thread so the time
//! loop only blocks when the writer falls behind.

use std::fs;
use std::io::{ErrorKind, Write};
use std::path::{Path, PathBuf};
use std::sync::mpsc;
use std::thread;

use super::config::{InitialKind, RunConfig};
use super::plot::PLOT_SCRIPT;
use super::series::write_diagnostics;
use super::snapshot::write_snapshot;
use super::{fmt_f64, IoError};
use crate::diagnostics::{DiagnosticsRecord, DiagnosticsTracker};
use crate::integrator::run;
use crate::params::SimParams;
use crate::state::{equilibrium_state, interface_initial_state, FlowState};

const SNAPSHOT_QUEUE: usize = 4;

type SnapshotSender = mpsc::SyncSender<(usize, FlowState)>;

#[derive(Debug, Clone)]
pub struct RunSummary {
    pub output_dir: PathBuf,
    pub steps: usize,
    pub final_time: f64,
    pub records: Vec<DiagnosticsRecord>,
}

pub fn initial_state(cfg: &RunConfig) -> Result<FlowState, IoError> {
    let grid = cfg.grid()?;
    let bc = cfg.boundary()?;
    Ok(match cfg.initial {
        InitialKind::Equilibrium => equilibrium_state(grid, &bc)?,
        InitialKind::Interface => {
            interface_initial_state(grid, &bc, &cfg.perturbation, cfg.params.positivity_floor)?
        }
    })
}

/// Exclusive claim on an output directory, released on drop.
struct RunLock(PathBuf);

impl RunLock {
    fn acquire(dir: &Path) -> Result<Self, IoError> {
        fs::create_dir_all(dir).map_err(|e| IoError::io(dir, e))?;
        let path = dir.join("run.lock");
        match fs::OpenOptions::new()
            .write(true)
            .create_new(true)
            .open(&path)
        {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(Self(path))
            }
            Err(e) if e.kind() == ErrorKind::AlreadyExists => Err(IoError::io(
                &path,
                std::io::Error::new(
                    ErrorKind::AlreadyExists,
                    "another run holds this output directory (remove the lock file if stale)",
                ),
            )),
            Err(e) => Err(IoError::io(&path, e)),
        }
    }
}

impl Drop for RunLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.0);
    }
}

fn spawn_snapshot_writer(
    dir: PathBuf,
    params: SimParams,
) -> (SnapshotSender, thread::JoinHandle<Result<(), IoError>>) {
    let (tx, rx) = mpsc::sync_channel::<(usize, FlowState)>(SNAPSHOT_QUEUE);
    let handle = thread::spawn(move || {
        fs::create_dir_all(&dir).map_err(|e| IoError::io(&dir, e))?;
        let mut index = String::from("step,t,file\n");
        for (step, state) in rx {
            let name = format!("snap_{step:07}.csv");
            write_snapshot(&state, &params, &dir.join(&name))?;
            index.push_str(&format!("{step},{},{name}\n", fmt_f64(state.t)));
        }
        let path = dir.join("index.csv");
        fs::write(&path, index).map_err(|e| IoError::io(&path, e))
    });
    (tx, handle)
}

pub fn run_simulation(cfg: &RunConfig) -> Result<RunSummary, IoError> {
    let params = cfg.params;
    params.validate()?;
    let bc = cfg.boundary()?;
    let initial = initial_state(cfg)?;

    let dir = cfg.output_dir.clone();
    let _lock = RunLock::acquire(&dir)?;
    let write = |name: &str, text: &str| {
        let path = dir.join(name);
        fs::write(&path, text).map_err(|e| IoError::io(&path, e))
    };
    write("config.txt", &cfg.to_text())?;
    write("plot.py", PLOT_SCRIPT)?;

    let mut tracker = DiagnosticsTracker::new(&initial, &params, &cfg.weighted_pairs)?;
    let mut records = Vec::new();
    let mut observer_error: Option<IoError> = None;
    let mut last_diag: Option<f64> = None;
    let mut last_snap: Option<f64> = None;
    let t_final = params.t_final;
    let (tx, writer) = spawn_snapshot_writer(dir.join("snapshots"), params);

    let outcome = run(initial, &params, &bc, t_final, 1, |state, control| {
        if observer_error.is_some() {
            return;
        }
        let step = control.step_count;
        let last = state.t >= t_final;
        if let Err(e) = tracker.observe(state) {
            observer_error = Some(e.into());
            return;
        }
        if step == 0 || last || cfg.diagnostics_cadence.due(step, state.t, last_diag) {
            match tracker.record(state, step) {
                Ok(r) => records.push(r),
                Err(e) => observer_error = Some(e.into()),
            }
            last_diag = Some(state.t);
        }
        if step == 0 || last || cfg.snapshot_cadence.due(step, state.t, last_snap) {
            // the writer only disconnects after an I/O error, reported on join
            let _ = tx.send((step, state.clone()));
            last_snap = Some(state.t);
        }
    });
    drop(tx);
    let writer_result = writer.join().expect("snapshot writer panicked");

    let diag_path = dir.join("diagnostics.csv");
    match outcome {
        Ok(out) => {
            writer_result?;
            if let Some(e) = observer_error {
                return Err(e);
            }
            write_diagnostics(&records, &diag_path)?;
            Ok(RunSummary {
                output_dir: dir.clone(),
                steps: out.control.step_count,
                final_time: out.state.t,
                records,
            })
        }
        Err(err) => {
            let dump = dir.join("abort_state.csv");
            write_snapshot(&err.last_state, &params, &dump)?;
            if let Ok(r) = tracker.record(&err.last_state, err.control.step_count) {
                if records.last().map(|l| l.step) != Some(r.step) {
                    records.push(r);
                }
            }
            write_diagnostics(&records, &diag_path)?;
            Err(IoError::Aborted {
                error: Box::new(err),
                dump,
            })
        }
    }
}
