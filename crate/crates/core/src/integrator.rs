//! Explicit Heun (SSP-RK2) time stepping with a stability-limited step.

use crate::error::{Result, SimError};
use crate::grid::N_GHOST;
use crate::operators::{semi_discrete_rhs, Rhs};
use crate::params::SimParams;
use crate::state::{BoundaryConfig, FlowState};

/// Boundary data and optional volume sources seen by the stepper.
pub trait Forcing {
    /// Populates the ghost layer for the state's current time.
    fn fill_ghosts(&self, state: &mut FlowState);

    /// Adds source terms evaluated at `state.t`.
    fn add_sources(&self, _state: &FlowState, _rhs: &mut Rhs) {}
}

impl Forcing for BoundaryConfig {
    fn fill_ghosts(&self, state: &mut FlowState) {
        state.fill_ghosts(self);
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LimitKind {
    Diffusion,
    Acoustic,
    Reaction,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StepControl {
    pub dt_last: f64,
    pub dt_next: f64,
    pub limit_kind: LimitKind,
    pub step_count: usize,
}

/// `cfl` times the smallest of the diffusion, acoustic and reaction limits
/// over all interior cells.
pub fn stable_dt(state: &FlowState, params: &SimParams) -> Result<(f64, LimitKind)> {
    state.check_finite()?;
    let dx = state.grid.dx();
    let gamma = params.gamma();
    let eps = params.epsilon;
    let mut best = (f64::INFINITY, LimitKind::Diffusion);
    let cells = state
        .v_interior()
        .iter()
        .zip(state.theta_interior())
        .zip(state.phi_interior());
    for ((&v, &theta), &phi) in cells {
        let diff_coef = (params.nu + params.conductivity(theta) / params.c_v + eps) / v;
        let diffusion = dx * dx / (2.0 * diff_coef);
        let sound = (gamma * params.gas_r * theta).sqrt() / v;
        let acoustic = dx / sound;
        let reaction = eps / (1.0 + (3.0 * phi * phi - 1.0).abs() * v / eps);
        for (limit, kind) in [
            (diffusion, LimitKind::Diffusion),
            (acoustic, LimitKind::Acoustic),
            (reaction, LimitKind::Reaction),
        ] {
            if limit < best.0 {
                best = (limit, kind);
            }
        }
    }
    let dt = params.cfl * best.0;
    if !(dt.is_finite() && dt > 0.0) {
        return Err(SimError::Precondition(format!(
            "stable time step is not positive: {dt}"
        )));
    }
    Ok((dt, best.1))
}

fn evaluate<F: Forcing + ?Sized>(
    state: &FlowState,
    params: &SimParams,
    forcing: &F,
) -> Result<Rhs> {
    let mut rhs = semi_discrete_rhs(state, params)?;
    forcing.add_sources(state, &mut rhs);
    Ok(rhs)
}

fn axpy_interior(dst: &mut [f64], src: &[f64], a: f64, delta: &[f64]) {
    for ((d, s), k) in dst[N_GHOST..N_GHOST + delta.len()]
        .iter_mut()
        .zip(&src[N_GHOST..])
        .zip(delta)
    {
        *d = s + a * k;
    }
}

/// One Heun step of size `dt`:
/// s* = s + dt F(s),  s⁺ = (s + s* + dt F(s*)) / 2.
pub fn step_dt<F: Forcing + ?Sized>(
    state: &FlowState,
    params: &SimParams,
    forcing: &F,
    dt: f64,
) -> Result<FlowState> {
    let mut s0 = state.clone();
    forcing.fill_ghosts(&mut s0);
    let k1 = evaluate(&s0, params, forcing)?;

    let mut s1 = s0.clone();
    axpy_interior(&mut s1.v, &s0.v, dt, &k1.dv);
    axpy_interior(&mut s1.u, &s0.u, dt, &k1.du);
    axpy_interior(&mut s1.theta, &s0.theta, dt, &k1.dtheta);
    axpy_interior(&mut s1.phi, &s0.phi, dt, &k1.dphi);
    for ((g1, g0), k) in s1.g.iter_mut().zip(&s0.g).zip(&k1.dg) {
        *g1 = g0 + dt * k;
    }
    s1.t = s0.t + dt;
    forcing.fill_ghosts(&mut s1);
    let k2 = evaluate(&s1, params, forcing)?;

    let mut out = s1.clone();
    let avg = |dst: &mut [f64], a: &[f64], b: &[f64], k: &[f64]| {
        for (i, ki) in k.iter().enumerate() {
            let j = i + N_GHOST;
            dst[j] = 0.5 * (a[j] + b[j] + dt * ki);
        }
    };
    avg(&mut out.v, &s0.v, &s1.v, &k2.dv);
    avg(&mut out.u, &s0.u, &s1.u, &k2.du);
    avg(&mut out.theta, &s0.theta, &s1.theta, &k2.dtheta);
    avg(&mut out.phi, &s0.phi, &s1.phi, &k2.dphi);
    for (i, k) in k2.dg.iter().enumerate() {
        out.g[i] = 0.5 * (s0.g[i] + s1.g[i] + dt * k);
    }
    out.t = s1.t;
    forcing.fill_ghosts(&mut out);
    out.check_finite()?;
    out.check_positivity(params.positivity_floor)?;
    Ok(out)
}

/// One step at the stable time step.
pub fn step<F: Forcing + ?Sized>(
    state: &FlowState,
    params: &SimParams,
    forcing: &F,
) -> Result<(FlowState, f64)> {
    let (dt, _) = stable_dt(state, params)?;
    Ok((step_dt(state, params, forcing, dt)?, dt))
}

/// Last accepted state and the error that stopped a run.
#[derive(Debug, Clone)]
pub struct RunError {
    pub source: SimError,
    pub last_state: Box<FlowState>,
    pub control: StepControl,
}

impl std::fmt::Display for RunError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(
            f,
            "run aborted after {} steps at t = {}: {}",
            self.control.step_count, self.last_state.t, self.source
        )
    }
}

impl std::error::Error for RunError {
    fn source(&self) -> Option<&(dyn std::error::Error + 'static)> {
        Some(&self.source)
    }
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub state: FlowState,
    pub control: StepControl,
}

const SLIVER: f64 = 1e-9;

/// Steps from `initial` to exactly `t_final`.
///
/// The observer sees the initial state, every `observe_every`-th accepted
/// state and the final state.
pub fn run<F, O>(
    initial: FlowState,
    params: &SimParams,
    forcing: &F,
    t_final: f64,
    observe_every: usize,
    mut observer: O,
) -> std::result::Result<RunOutcome, RunError>
where
    F: Forcing + ?Sized,
    O: FnMut(&FlowState, &StepControl),
{
    let mut control = StepControl {
        dt_last: 0.0,
        dt_next: 0.0,
        limit_kind: LimitKind::Diffusion,
        step_count: 0,
    };
    let mut state = initial;
    let fail = |source: SimError, state: &FlowState, control: StepControl| RunError {
        source,
        last_state: Box::new(state.clone()),
        control,
    };
    if !(t_final >= state.t) {
        return Err(fail(
            SimError::Precondition(format!(
                "t_final = {t_final} precedes the initial time {}",
                state.t
            )),
            &state,
            control,
        ));
    }
    forcing.fill_ghosts(&mut state);
    match stable_dt(&state, params) {
        Ok((dt, kind)) => {
            control.dt_next = dt;
            control.limit_kind = kind;
        }
        Err(e) => return Err(fail(e, &state, control)),
    }
    observer(&state, &control);
    let every = observe_every.max(1);

    while state.t < t_final {
        let remaining = t_final - state.t;
        // absorb roundoff slivers into the final step
        let last = control.dt_next * (1.0 + SLIVER) >= remaining;
        let dt = if last { remaining } else { control.dt_next };
        let mut next = match step_dt(&state, params, forcing, dt) {
            Ok(s) => s,
            Err(e) => return Err(fail(e, &state, control)),
        };
        if last {
            next.t = t_final;
        }
        state = next;
        control.dt_last = dt;
        control.step_count += 1;
        if state.t < t_final {
            match stable_dt(&state, params) {
                Ok((dt, kind)) => {
                    control.dt_next = dt;
                    control.limit_kind = kind;
                }
                Err(e) => return Err(fail(e, &state, control)),
            }
        }
        if control.step_count.is_multiple_of(every) || state.t >= t_final {
            observer(&state, &control);
        }
    }
    Ok(RunOutcome { state, control })
}
