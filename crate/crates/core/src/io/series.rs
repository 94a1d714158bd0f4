//! Diagnostics time series and convergence tables as CSV.

use std::fs;
use std::path::Path;

use super::{fmt_f64, IoError};
use crate::diagnostics::{DiagnosticsRecord, WeightedDiss};
use crate::mms::ConvergenceTable;

pub const DIAGNOSTICS_SCHEMA: &str =
    "# nsac diagnostics v1: one row per record, midpoint sums over interior cells, wd_* columns are the cut-off weighted dissipation rate/time integral per (alpha, n)";

const FIXED_COLUMNS: &[&str] = &[
    "t",
    "step",
    "mass_excess",
    "energy_total",
    "e_lyap",
    "v_diss",
    "cumulative_diss",
    "phi_min",
    "phi_max",
    "v_min",
    "v_max",
    "theta_min",
    "theta_max",
    "bracket_violations",
    "lemma24_residual",
];

fn pair_columns(w: &WeightedDiss) -> [String; 2] {
    let tag = format!("a{}_n{}", fmt_f64(w.alpha), w.n);
    [format!("wd_rate_{tag}"), format!("wd_int_{tag}")]
}

pub fn diagnostics_text(records: &[DiagnosticsRecord]) -> String {
    let mut header: Vec<String> = FIXED_COLUMNS.iter().map(|s| s.to_string()).collect();
    if let Some(first) = records.first() {
        for w in &first.weighted_diss {
            header.extend(pair_columns(w));
        }
    }
    let mut out = String::new();
    out.push_str(DIAGNOSTICS_SCHEMA);
    out.push('\n');
    out.push_str(&header.join(","));
    out.push('\n');
    for r in records {
        let mut row = vec![
            fmt_f64(r.t),
            r.step.to_string(),
            fmt_f64(r.mass_excess),
            fmt_f64(r.energy_total),
            fmt_f64(r.e_lyap),
            fmt_f64(r.v_diss),
            fmt_f64(r.cumulative_diss),
            fmt_f64(r.phi_min),
            fmt_f64(r.phi_max),
            fmt_f64(r.v_min),
            fmt_f64(r.v_max),
            fmt_f64(r.theta_min),
            fmt_f64(r.theta_max),
            r.bracket_violations.to_string(),
            fmt_f64(r.lemma24_residual),
        ];
        for w in &r.weighted_diss {
            row.push(fmt_f64(w.rate));
            row.push(fmt_f64(w.integral));
        }
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

pub fn write_diagnostics(records: &[DiagnosticsRecord], path: &Path) -> Result<(), IoError> {
    fs::write(path, diagnostics_text(records)).map_err(|e| IoError::io(path, e))
}

fn parse_pair_tag(name: &str) -> Option<(bool, f64, i64)> {
    let (rate, rest) = if let Some(r) = name.strip_prefix("wd_rate_a") {
        (true, r)
    } else {
        (false, name.strip_prefix("wd_int_a")?)
    };
    let (alpha, n) = rest.split_once("_n")?;
    Some((rate, alpha.parse().ok()?, n.parse().ok()?))
}

pub fn read_diagnostics(path: &Path) -> Result<Vec<DiagnosticsRecord>, IoError> {
    let text = fs::read_to_string(path).map_err(|e| IoError::io(path, e))?;
    let mut lines = text
        .lines()
        .enumerate()
        .filter(|(_, l)| !l.trim_start().starts_with('#') && !l.trim().is_empty());
    let (hline, header) = lines
        .next()
        .ok_or_else(|| IoError::parse(path, 1, "missing header"))?;
    let names: Vec<&str> = header.split(',').map(str::trim).collect();
    if names.len() < FIXED_COLUMNS.len() || names[..FIXED_COLUMNS.len()] != *FIXED_COLUMNS {
        return Err(IoError::parse(
            path,
            hline + 1,
            format!(
                "unexpected header, expected it to start with {}",
                FIXED_COLUMNS.join(",")
            ),
        ));
    }
    let extra = &names[FIXED_COLUMNS.len()..];
    if !extra.len().is_multiple_of(2) {
        return Err(IoError::parse(
            path,
            hline + 1,
            "weighted columns must come in rate/int pairs",
        ));
    }
    let mut pairs = Vec::new();
    for chunk in extra.chunks(2) {
        match (parse_pair_tag(chunk[0]), parse_pair_tag(chunk[1])) {
            (Some((true, a, n)), Some((false, a2, n2))) if a == a2 && n == n2 => pairs.push((a, n)),
            _ => {
                return Err(IoError::parse(
                    path,
                    hline + 1,
                    format!("bad weighted columns {chunk:?}"),
                ))
            }
        }
    }

    let mut records = Vec::new();
    for (idx, line) in lines {
        let lineno = idx + 1;
        let cells: Vec<&str> = line.split(',').map(str::trim).collect();
        if cells.len() != names.len() {
            return Err(IoError::parse(
                path,
                lineno,
                format!("expected {} columns, got {}", names.len(), cells.len()),
            ));
        }
        let f = |k: usize| {
            cells[k].parse::<f64>().map_err(|_| {
                IoError::parse(
                    path,
                    lineno,
                    format!("column {}: not a number '{}'", names[k], cells[k]),
                )
            })
        };
        let u = |k: usize| {
            cells[k].parse::<usize>().map_err(|_| {
                IoError::parse(
                    path,
                    lineno,
                    format!("column {}: not an integer '{}'", names[k], cells[k]),
                )
            })
        };
        let mut weighted = Vec::with_capacity(pairs.len());
        for (p, &(alpha, n)) in pairs.iter().enumerate() {
            let base = FIXED_COLUMNS.len() + 2 * p;
            weighted.push(WeightedDiss {
                alpha,
                n,
                rate: f(base)?,
                integral: f(base + 1)?,
            });
        }
        records.push(DiagnosticsRecord {
            t: f(0)?,
            step: u(1)?,
            mass_excess: f(2)?,
            energy_total: f(3)?,
            e_lyap: f(4)?,
            v_diss: f(5)?,
            cumulative_diss: f(6)?,
            phi_min: f(7)?,
            phi_max: f(8)?,
            v_min: f(9)?,
            v_max: f(10)?,
            theta_min: f(11)?,
            theta_max: f(12)?,
            bracket_violations: u(13)?,
            lemma24_residual: f(14)?,
            weighted_diss: weighted,
        });
    }
    Ok(records)
}

pub fn convergence_text(table: &ConvergenceTable) -> String {
    let mut out =
        String::from("N,err_v,err_u,err_theta,err_phi,order_v,order_u,order_theta,order_phi\n");
    for row in &table.rows {
        let mut cells = vec![row.n.to_string()];
        cells.extend(row.errors.iter().map(|&e| fmt_f64(e)));
        match row.orders {
            Some(o) => cells.extend(o.iter().map(|&x| fmt_f64(x))),
            None => cells.extend(std::iter::repeat_n(String::new(), 4)),
        }
        out.push_str(&cells.join(","));
        out.push('\n');
    }
    out
}

pub fn write_convergence(table: &ConvergenceTable, path: &Path) -> Result<(), IoError> {
    fs::write(path, convergence_text(table)).map_err(|e| IoError::io(path, e))
}
