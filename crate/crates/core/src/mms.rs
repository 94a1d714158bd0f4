//! Manufactured solutions for the full system.
//!
//! The fields
//!
//! ```text
//! v* = 1 + A sin(kx) e^{-t}            u* = A sin(kx) e^{-t}
//! θ* = 1 + A cos(kx) (1 - e^{-t}) b(x) φ* = tanh((x/2)(1 + (x/m)²))
//! ```
//!
//! with k = π/L, b(x) = exp(-(x/ℓ)²), ℓ = L/6 and m = L/2, reach the far
//! field at |x| = L to roundoff. Sources are the residuals of each equation
//! written as `field_t = F(fields) + S`, differentiated by hand below; the
//! symbolic cross-check lives in `tests/oracles/mms_sources.py`.
//!
//! During a study the ghost layer carries the exact fields, so the measured
//! error is pure truncation error of the interior scheme.

use std::f64::consts::PI;

use crate::error::{Result, SimError};
use crate::grid::{make_grid, MassGrid, N_GHOST};
use crate::integrator::{run, Forcing};
use crate::operators::Rhs;
use crate::params::SimParams;
use crate::state::{BoundaryConfig, FlowState};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ManufacturedCase {
    pub amplitude: f64,
    /// Phase interface (φ* = tanh profile) instead of the pure phase φ* = 1.
    pub interface: bool,
    pub half_width: f64,
    pub params: SimParams,
    /// End of the validity window, where errors are measured.
    pub t_final: f64,
}

/// Field values and the derivatives the sources need.
#[derive(Debug, Clone, Copy, Default)]
struct Jet {
    v: f64,
    v_x: f64,
    v_t: f64,
    u: f64,
    u_x: f64,
    u_xx: f64,
    u_t: f64,
    th: f64,
    th_x: f64,
    th_xx: f64,
    th_t: f64,
    ph: f64,
    ph_x: f64,
    ph_xx: f64,
    ph_t: f64,
}

pub fn default_case(params: &SimParams, grid: &MassGrid) -> ManufacturedCase {
    ManufacturedCase {
        amplitude: 0.1,
        interface: true,
        half_width: grid.half_width(),
        params: *params,
        t_final: 0.5,
    }
}

impl ManufacturedCase {
    /// Zero amplitude and no interface: the equilibrium (1, 0, 1, 1).
    pub fn equilibrium(params: &SimParams, grid: &MassGrid) -> Self {
        Self {
            amplitude: 0.0,
            interface: false,
            ..default_case(params, grid)
        }
    }

    pub fn boundary(&self) -> BoundaryConfig {
        if self.interface {
            BoundaryConfig::new(-1.0, 1.0).expect("unit phases")
        } else {
            BoundaryConfig::uniform(1.0).expect("unit phase")
        }
    }

    fn jet(&self, x: f64, t: f64) -> Jet {
        let a = self.amplitude;
        let l = self.half_width;
        let k = PI / l;
        let (s, c) = (k * x).sin_cos();
        let e = (-t).exp();

        let lb = l / 6.0;
        let b = (-(x / lb).powi(2)).exp();
        let b1 = -2.0 * x / (lb * lb) * b;
        let b2 = (4.0 * x * x / lb.powi(4) - 2.0 / (lb * lb)) * b;
        let h = c * b;
        let h1 = -k * s * b + c * b1;
        let h2 = -k * k * c * b - 2.0 * k * s * b1 + c * b2;

        let mut j = Jet {
            v: 1.0 + a * s * e,
            v_x: a * k * c * e,
            v_t: -a * s * e,
            u: a * s * e,
            u_x: a * k * c * e,
            u_xx: -a * k * k * s * e,
            u_t: -a * s * e,
            th: 1.0 + a * (1.0 - e) * h,
            th_x: a * (1.0 - e) * h1,
            th_xx: a * (1.0 - e) * h2,
            th_t: a * e * h,
            ph: 1.0,
            ..Jet::default()
        };
        if self.interface {
            let m = l / 2.0;
            let z = 0.5 * x * (1.0 + (x / m).powi(2));
            let z1 = 0.5 + 1.5 * x * x / (m * m);
            let z2 = 3.0 * x / (m * m);
            let ph = z.tanh();
            let sech2 = 1.0 - ph * ph;
            j.ph = ph;
            j.ph_x = sech2 * z1;
            j.ph_xx = sech2 * (z2 - 2.0 * ph * z1 * z1);
        }
        j
    }

    /// Exact (v, u, θ, φ) at (x, t).
    pub fn exact(&self, x: f64, t: f64) -> [f64; 4] {
        let j = self.jet(x, t);
        [j.v, j.u, j.th, j.ph]
    }

    /// Sources (S_v, S_u, S_θ, S_φ) that make the exact fields solve
    /// `field_t = F(fields) + S`.
    pub fn sources(&self, x: f64, t: f64) -> [f64; 4] {
        let p = &self.params;
        let eps = p.epsilon;
        let j = self.jet(x, t);
        let (v, vx) = (j.v, j.v_x);

        let mu = (j.ph.powi(3) - j.ph) / eps - eps * (j.ph_xx / v - j.ph_x * vx / (v * v));

        let s_v = j.v_t - j.u_x;

        let grad_thermal = p.gas_r * (j.th_x * v - j.th * vx) / (v * v);
        let grad_capillary =
            eps * (j.ph_x * j.ph_xx / (v * v) - j.ph_x * j.ph_x * vx / (v * v * v));
        let viscous = j.u_xx / v - j.u_x * vx / (v * v);
        let s_u = j.u_t + grad_thermal + grad_capillary - p.nu * viscous;

        let s_phi = j.ph_t + v * mu;

        let kap = p.conductivity(j.th);
        let conduction =
            kap * (p.beta * j.th_x * j.th_x / j.th + j.th_xx) / v - kap * j.th_x * vx / (v * v);
        let f_theta =
            (-(p.gas_r * j.th / v) * j.u_x + conduction + p.nu * j.u_x * j.u_x / v + v * mu * mu)
                / p.c_v;
        let s_theta = j.th_t - f_theta;

        [s_v, s_u, s_theta, s_phi]
    }

    pub fn initial_state(&self, grid: MassGrid) -> FlowState {
        let mut s = FlowState::from_profiles(grid, &self.boundary(), |x| self.exact(x, 0.0));
        self.fill_ghosts(&mut s);
        s
    }

    /// L² errors of (v, u, θ, φ) against the exact fields at `state.t`.
    pub fn errors(&self, state: &FlowState) -> [f64; 4] {
        let grid = &state.grid;
        let mut sq = [0.0; 4];
        for i in 0..grid.n_cells() {
            let ex = self.exact(grid.x(i), state.t);
            let j = i + N_GHOST;
            let got = [state.v[j], state.u[j], state.theta[j], state.phi[j]];
            for k in 0..4 {
                let d = got[k] - ex[k];
                sq[k] += d * d;
            }
        }
        sq.map(|s| (s * grid.dx()).sqrt())
    }
}

impl Forcing for ManufacturedCase {
    fn fill_ghosts(&self, state: &mut FlowState) {
        let grid = state.grid;
        let n = grid.n_cells();
        let ghosts = (0..N_GHOST).chain(N_GHOST + n..grid.padded_len());
        for j in ghosts {
            let [v, u, th, ph] = self.exact(grid.x_padded(j), state.t);
            state.v[j] = v;
            state.u[j] = u;
            state.theta[j] = th;
            state.phi[j] = ph;
        }
    }

    fn add_sources(&self, state: &FlowState, rhs: &mut Rhs) {
        for i in 0..state.n_cells() {
            let [sv, su, st, sp] = self.sources(state.grid.x(i), state.t);
            rhs.dv[i] += sv;
            rhs.du[i] += su;
            rhs.dtheta[i] += st;
            rhs.dphi[i] += sp;
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceRow {
    pub n: usize,
    /// L² errors in (v, u, θ, φ).
    pub errors: [f64; 4],
    /// log₂(e_{N/2} / e_N) against the previous row; `None` on the first.
    pub orders: Option<[f64; 4]>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ConvergenceTable {
    pub rows: Vec<ConvergenceRow>,
}

impl ConvergenceTable {
    /// Orders of the finest refinement pair.
    pub fn finest_orders(&self) -> Option<[f64; 4]> {
        self.rows.last().and_then(|r| r.orders)
    }
}

/// Runs the forced scheme at each resolution to `case.t_final` and measures
/// the errors. Resolutions must be at least three successive doublings.
pub fn convergence_study(
    case: &ManufacturedCase,
    resolutions: &[usize],
) -> Result<ConvergenceTable> {
    if resolutions.len() < 3 {
        return Err(SimError::Precondition(format!(
            "a convergence study needs at least 3 resolutions, got {}",
            resolutions.len()
        )));
    }
    if let Some(w) = resolutions.windows(2).find(|w| w[1] != 2 * w[0]) {
        return Err(SimError::Precondition(format!(
            "resolutions must double: {} is followed by {}",
            w[0], w[1]
        )));
    }
    case.params.validate()?;
    let grids = resolutions
        .iter()
        .map(|&n| make_grid(case.half_width, n))
        .collect::<Result<Vec<_>>>()?;

    let results: Vec<Result<[f64; 4]>> = std::thread::scope(|scope| {
        let handles: Vec<_> = grids
            .iter()
            .map(|&grid| {
                scope.spawn(move || {
                    let initial = case.initial_state(grid);
                    run(
                        initial,
                        &case.params,
                        case,
                        case.t_final,
                        usize::MAX,
                        |_, _| {},
                    )
                    .map(|out| case.errors(&out.state))
                    .map_err(|e| SimError::AtResolution {
                        n: grid.n_cells(),
                        source: Box::new(e.source),
                    })
                })
            })
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("convergence worker panicked"))
            .collect()
    });

    let mut rows: Vec<ConvergenceRow> = Vec::with_capacity(resolutions.len());
    for (&n, res) in resolutions.iter().zip(results) {
        let errors = res?;
        let orders = rows.last().map(|prev| {
            let mut o = [0.0; 4];
            for k in 0..4 {
                o[k] = (prev.errors[k] / errors[k]).log2();
            }
            o
        });
        rows.push(ConvergenceRow { n, errors, orders });
    }
    Ok(ConvergenceTable { rows })
}
