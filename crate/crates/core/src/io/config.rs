//! Line-based `key = value` run configuration. `#` starts a comment,
//! unknown keys are rejected.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::PathBuf;

use thiserror::Error;

use super::fmt_f64;
use crate::error::SimError;
use crate::grid::{make_grid, MassGrid};
use crate::params::{FaceMean, SimParams};
use crate::state::{BoundaryConfig, Bump, Perturbation};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("unknown key '{key}' (line {line})")]
    UnknownKey { key: String, line: usize },

    #[error("duplicate key '{key}' (line {line})")]
    DuplicateKey { key: String, line: usize },

    #[error("line {line}: expected `key = value`, got '{text}'")]
    Malformed { line: usize, text: String },

    #[error("invalid value for '{key}' (line {line}): {reason}")]
    InvalidValue {
        key: String,
        line: usize,
        reason: String,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum InitialKind {
    Equilibrium,
    Interface,
}

/// How often a run emits output.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Cadence {
    Off,
    Steps(usize),
    /// First accepted state at or past each multiple of the interval.
    Time(f64),
}

impl Cadence {
    fn parse(text: &str) -> Result<Self, String> {
        if text == "off" {
            return Ok(Cadence::Off);
        }
        let (kind, value) = text
            .split_once(':')
            .ok_or_else(|| format!("expected `off`, `steps:K` or `time:DT`, got '{text}'"))?;
        match kind.trim() {
            "steps" => match value.trim().parse::<usize>() {
                Ok(k) if k > 0 => Ok(Cadence::Steps(k)),
                _ => Err(format!(
                    "step cadence must be a positive integer, got '{value}'"
                )),
            },
            "time" => match value.trim().parse::<f64>() {
                Ok(dt) if dt.is_finite() && dt > 0.0 => Ok(Cadence::Time(dt)),
                _ => Err(format!(
                    "time cadence must be finite and > 0, got '{value}'"
                )),
            },
            other => Err(format!("unknown cadence kind '{other}'")),
        }
    }

    fn render(&self) -> String {
        match self {
            Cadence::Off => "off".to_string(),
            Cadence::Steps(k) => format!("steps:{k}"),
            Cadence::Time(dt) => format!("time:{}", fmt_f64(*dt)),
        }
    }

    /// Whether output is due after `step` accepted steps at time `t`,
    /// given the time of the previous emission.
    pub fn due(&self, step: usize, t: f64, last_emitted: Option<f64>) -> bool {
        match *self {
            Cadence::Off => false,
            Cadence::Steps(k) => step.is_multiple_of(k),
            Cadence::Time(dt) => match last_emitted {
                None => true,
                Some(prev) => (t / dt).floor() > (prev / dt).floor(),
            },
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RunConfig {
    pub params: SimParams,
    pub half_width: f64,
    pub n_cells: usize,
    pub phi_left: f64,
    pub phi_right: f64,
    pub initial: InitialKind,
    pub perturbation: Perturbation,
    pub output_dir: PathBuf,
    pub snapshot_cadence: Cadence,
    pub diagnostics_cadence: Cadence,
    /// (α, n) pairs for the cut-off weighted dissipation.
    pub weighted_pairs: Vec<(f64, i64)>,
    pub seed: u64,
    pub mms_resolutions: Vec<usize>,
    pub mms_amplitude: f64,
    pub mms_t_final: f64,
}

impl Default for RunConfig {
    fn default() -> Self {
        Self {
            params: SimParams::default(),
            half_width: 16.0,
            n_cells: 512,
            phi_left: -1.0,
            phi_right: 1.0,
            initial: InitialKind::Interface,
            perturbation: Perturbation::default(),
            output_dir: PathBuf::from("out"),
            snapshot_cadence: Cadence::Time(0.25),
            diagnostics_cadence: Cadence::Steps(10),
            weighted_pairs: vec![(0.5, 0)],
            seed: 0,
            mms_resolutions: vec![128, 256, 512],
            mms_amplitude: 0.1,
            mms_t_final: 0.5,
        }
    }
}

/// Every recognized key, in the order `to_text` writes them.
pub const KEYS: &[&str] = &[
    "epsilon",
    "beta",
    "nu",
    "gas_r",
    "c_v",
    "kappa_tilde",
    "cfl",
    "t_final",
    "positivity_floor",
    "face_mean",
    "half_width",
    "n_cells",
    "phi_left",
    "phi_right",
    "initial",
    "interface_width",
    "interface_center",
    "v_bump_amplitude",
    "v_bump_center",
    "v_bump_width",
    "u_bump_amplitude",
    "u_bump_center",
    "u_bump_width",
    "theta_bump_amplitude",
    "theta_bump_center",
    "theta_bump_width",
    "output_dir",
    "snapshot_cadence",
    "diagnostics_cadence",
    "weighted_pairs",
    "seed",
    "mms_resolutions",
    "mms_amplitude",
    "mms_t_final",
];

fn parse_f64(v: &str) -> Result<f64, String> {
    v.parse::<f64>().map_err(|_| format!("not a number: '{v}'"))
}

fn parse_list<T>(v: &str, item: impl Fn(&str) -> Result<T, String>) -> Result<Vec<T>, String> {
    if v.is_empty() {
        return Ok(Vec::new());
    }
    v.split(',').map(|s| item(s.trim())).collect()
}

fn parse_pair(s: &str) -> Result<(f64, i64), String> {
    let (a, n) = s
        .split_once(':')
        .ok_or_else(|| format!("expected `alpha:n`, got '{s}'"))?;
    let alpha = parse_f64(a.trim())?;
    let n = n
        .trim()
        .parse::<i64>()
        .map_err(|_| format!("not an integer: '{n}'"))?;
    Ok((alpha, n))
}

impl RunConfig {
    fn set(&mut self, key: &str, value: &str) -> Result<(), String> {
        let p = &mut self.params;
        let pert = &mut self.perturbation;
        match key {
            "epsilon" => p.epsilon = parse_f64(value)?,
            "beta" => p.beta = parse_f64(value)?,
            "nu" => p.nu = parse_f64(value)?,
            "gas_r" => p.gas_r = parse_f64(value)?,
            "c_v" => p.c_v = parse_f64(value)?,
            "kappa_tilde" => p.kappa_tilde = parse_f64(value)?,
            "cfl" => p.cfl = parse_f64(value)?,
            "t_final" => p.t_final = parse_f64(value)?,
            "positivity_floor" => p.positivity_floor = parse_f64(value)?,
            "face_mean" => {
                p.face_mean = match value {
                    "arithmetic" => FaceMean::Arithmetic,
                    "harmonic" => FaceMean::Harmonic,
                    _ => {
                        return Err(format!(
                            "expected `arithmetic` or `harmonic`, got '{value}'"
                        ))
                    }
                }
            }
            "half_width" => self.half_width = parse_f64(value)?,
            "n_cells" => {
                self.n_cells = value
                    .parse()
                    .map_err(|_| format!("not a cell count: '{value}'"))?
            }
            "phi_left" => self.phi_left = parse_f64(value)?,
            "phi_right" => self.phi_right = parse_f64(value)?,
            "initial" => {
                self.initial = match value {
                    "equilibrium" => InitialKind::Equilibrium,
                    "interface" => InitialKind::Interface,
                    _ => {
                        return Err(format!(
                            "expected `equilibrium` or `interface`, got '{value}'"
                        ))
                    }
                }
            }
            "interface_width" => pert.interface_width = parse_f64(value)?,
            "interface_center" => pert.interface_center = parse_f64(value)?,
            "v_bump_amplitude" => pert.v.amplitude = parse_f64(value)?,
            "v_bump_center" => pert.v.center = parse_f64(value)?,
            "v_bump_width" => pert.v.width = parse_f64(value)?,
            "u_bump_amplitude" => pert.u.amplitude = parse_f64(value)?,
            "u_bump_center" => pert.u.center = parse_f64(value)?,
            "u_bump_width" => pert.u.width = parse_f64(value)?,
            "theta_bump_amplitude" => pert.theta.amplitude = parse_f64(value)?,
            "theta_bump_center" => pert.theta.center = parse_f64(value)?,
            "theta_bump_width" => pert.theta.width = parse_f64(value)?,
            "output_dir" => {
                if value.is_empty() {
                    return Err("output directory must not be empty".into());
                }
                self.output_dir = PathBuf::from(value)
            }
            "snapshot_cadence" => self.snapshot_cadence = Cadence::parse(value)?,
            "diagnostics_cadence" => self.diagnostics_cadence = Cadence::parse(value)?,
            "weighted_pairs" => self.weighted_pairs = parse_list(value, parse_pair)?,
            "seed" => {
                self.seed = value
                    .parse()
                    .map_err(|_| format!("not a seed: '{value}'"))?
            }
            "mms_resolutions" => {
                self.mms_resolutions = parse_list(value, |s| {
                    s.parse::<usize>()
                        .map_err(|_| format!("not a cell count: '{s}'"))
                })?
            }
            "mms_amplitude" => self.mms_amplitude = parse_f64(value)?,
            "mms_t_final" => self.mms_t_final = parse_f64(value)?,
            _ => unreachable!("key list and setter out of sync: {key}"),
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<MassGrid, SimError> {
        make_grid(self.half_width, self.n_cells)
    }

    pub fn boundary(&self) -> Result<BoundaryConfig, SimError> {
        BoundaryConfig::new(self.phi_left, self.phi_right)
    }

    /// Checks cross-field invariants; returns the offending key and reason.
    fn check(&self) -> Result<(), (&'static str, String)> {
        if let Err(SimError::InvalidParameter { name, reason }) = self.params.validate() {
            return Err((name, reason));
        }
        if let Err(e) = self.grid() {
            let key = if self.half_width > 0.0 {
                "n_cells"
            } else {
                "half_width"
            };
            return Err((key, e.to_string()));
        }
        if let Err(e) = self.boundary() {
            return Err(("phi_left", e.to_string()));
        }
        if self.initial == InitialKind::Equilibrium && self.phi_left != self.phi_right {
            return Err(("initial", "equilibrium needs phi_left = phi_right".into()));
        }
        if let Some((a, _)) = self
            .weighted_pairs
            .iter()
            .find(|(a, _)| !(*a > 0.0 && *a < 1.0))
        {
            return Err((
                "weighted_pairs",
                format!("alpha must lie in (0, 1), got {a}"),
            ));
        }
        if !(self.mms_t_final.is_finite() && self.mms_t_final > 0.0) {
            return Err(("mms_t_final", "must be finite and > 0".into()));
        }
        if !self.mms_amplitude.is_finite() || self.mms_amplitude.abs() > 0.5 {
            return Err(("mms_amplitude", "must lie in [-0.5, 0.5]".into()));
        }
        Ok(())
    }

    /// Canonical text form: every key, one per line.
    pub fn to_text(&self) -> String {
        let p = &self.params;
        let pert = &self.perturbation;
        let face = match p.face_mean {
            FaceMean::Arithmetic => "arithmetic",
            FaceMean::Harmonic => "harmonic",
        };
        let initial = match self.initial {
            InitialKind::Equilibrium => "equilibrium",
            InitialKind::Interface => "interface",
        };
        let bump = |b: &Bump| [fmt_f64(b.amplitude), fmt_f64(b.center), fmt_f64(b.width)];
        let [va, vc, vw] = bump(&pert.v);
        let [ua, uc, uw] = bump(&pert.u);
        let [ta, tc, tw] = bump(&pert.theta);
        let pairs = self
            .weighted_pairs
            .iter()
            .map(|(a, n)| format!("{}:{n}", fmt_f64(*a)))
            .collect::<Vec<_>>()
            .join(", ");
        let res = self
            .mms_resolutions
            .iter()
            .map(|n| n.to_string())
            .collect::<Vec<_>>()
            .join(", ");
        let values: Vec<String> = vec![
            fmt_f64(p.epsilon),
            fmt_f64(p.beta),
            fmt_f64(p.nu),
            fmt_f64(p.gas_r),
            fmt_f64(p.c_v),
            fmt_f64(p.kappa_tilde),
            fmt_f64(p.cfl),
            fmt_f64(p.t_final),
            fmt_f64(p.positivity_floor),
            face.into(),
            fmt_f64(self.half_width),
            self.n_cells.to_string(),
            fmt_f64(self.phi_left),
            fmt_f64(self.phi_right),
            initial.into(),
            fmt_f64(pert.interface_width),
            fmt_f64(pert.interface_center),
            va,
            vc,
            vw,
            ua,
            uc,
            uw,
            ta,
            tc,
            tw,
            self.output_dir.display().to_string(),
            self.snapshot_cadence.render(),
            self.diagnostics_cadence.render(),
            pairs,
            self.seed.to_string(),
            res,
            fmt_f64(self.mms_amplitude),
            fmt_f64(self.mms_t_final),
        ];
        let mut out = String::new();
        for (k, v) in KEYS.iter().zip(values) {
            let _ = writeln!(out, "{k} = {v}");
        }
        out
    }
}

/// Parses a config, applying defaults for absent keys.
pub fn parse_config(text: &str) -> Result<RunConfig, ConfigError> {
    let mut cfg = RunConfig::default();
    let mut seen: HashMap<&'static str, usize> = HashMap::new();
    for (idx, raw) in text.lines().enumerate() {
        let line = idx + 1;
        let body = raw.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let (key, value) = body.split_once('=').ok_or_else(|| ConfigError::Malformed {
            line,
            text: body.to_string(),
        })?;
        let (key, value) = (key.trim(), value.trim());
        let known = KEYS
            .iter()
            .find(|k| **k == key)
            .ok_or_else(|| ConfigError::UnknownKey {
                key: key.to_string(),
                line,
            })?;
        if seen.insert(known, line).is_some() {
            return Err(ConfigError::DuplicateKey {
                key: key.to_string(),
                line,
            });
        }
        cfg.set(known, value)
            .map_err(|reason| ConfigError::InvalidValue {
                key: key.to_string(),
                line,
                reason,
            })?;
    }
    cfg.check()
        .map_err(|(key, reason)| ConfigError::InvalidValue {
            key: key.to_string(),
            line: seen.get(key).copied().unwrap_or(0),
            reason,
        })?;
    Ok(cfg)
}
