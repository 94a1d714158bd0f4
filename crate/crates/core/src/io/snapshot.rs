//! Snapshot CSV: header `x,v,u,theta,phi,mu,G`, one interior cell per row in
//! ascending x, values in shortest round-trip decimal.

use std::fs;
use std::io::{BufWriter, Write};
use std::path::Path;

use super::{fmt_f64, IoError};
use crate::grid::{MassGrid, N_GHOST};
use crate::operators::chemical_potential;
use crate::params::SimParams;
use crate::state::{BoundaryConfig, FlowState};

pub const SNAPSHOT_HEADER: &str = "x,v,u,theta,phi,mu,G";

pub fn snapshot_text(state: &FlowState, params: &SimParams) -> String {
    let mu = chemical_potential(state, params);
    let mut out = String::with_capacity(64 * (state.n_cells() + 1));
    out.push_str(SNAPSHOT_HEADER);
    out.push('\n');
    for i in 0..state.n_cells() {
        let j = i + N_GHOST;
        let row = [
            state.grid.x(i),
            state.v[j],
            state.u[j],
            state.theta[j],
            state.phi[j],
            mu[i],
            state.g[i],
        ];
        let cells: Vec<String> = row.iter().map(|&x| fmt_f64(x)).collect();
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_snapshot(state: &FlowState, params: &SimParams, path: &Path) -> Result<(), IoError> {
    let file = fs::File::create(path).map_err(|e| IoError::io(path, e))?;
    let mut w = BufWriter::new(file);
    w.write_all(snapshot_text(state, params).as_bytes())
        .and_then(|_| w.flush())
        .map_err(|e| IoError::io(path, e))
}

/// Loads a snapshot written on `grid`; ghosts are refilled from `bc`.
pub fn read_snapshot(
    path: &Path,
    grid: MassGrid,
    bc: &BoundaryConfig,
    t: f64,
) -> Result<FlowState, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h.trim() == SNAPSHOT_HEADER => {}
        other => {
            return Err(IoError::parse(
                path,
                1,
                format!("expected header '{SNAPSHOT_HEADER}', got {other:?}"),
            ))
        }
    }
    let mut state = FlowState::from_profiles(grid, bc, |_| [1.0, 0.0, 1.0, 0.0]);
    state.t = t;
    let mut rows = 0;
    for (k, line) in lines.enumerate() {
        let lineno = k + 2;
        if line.trim().is_empty() {
            continue;
        }
        if rows >= grid.n_cells() {
            return Err(IoError::parse(path, lineno, "more rows than grid cells"));
        }
        let vals = line
            .split(',')
            .map(|s| s.trim().parse::<f64>())
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| IoError::parse(path, lineno, e.to_string()))?;
        if vals.len() != 7 {
            return Err(IoError::parse(
                path,
                lineno,
                format!("expected 7 columns, got {}", vals.len()),
            ));
        }
        let x = grid.x(rows);
        if (vals[0] - x).abs() > 1e-9 * grid.half_width() {
            return Err(IoError::parse(
                path,
                lineno,
                format!("x = {} does not match grid cell {rows} at {x}", vals[0]),
            ));
        }
        let j = rows + N_GHOST;
        state.v[j] = vals[1];
        state.u[j] = vals[2];
        state.theta[j] = vals[3];
        state.phi[j] = vals[4];
        state.g[rows] = vals[6];
        rows += 1;
    }
    if rows != grid.n_cells() {
        return Err(IoError::parse(
            path,
            rows + 1,
            format!("expected {} rows, got {rows}", grid.n_cells()),
        ));
    }
    Ok(state)
}
