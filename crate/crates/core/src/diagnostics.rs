//! Scalar functionals of a state: conservation sums, the entropy/Lyapunov
//! functional and its dissipation, unit-interval average brackets, cut-off
//! weighted dissipation and the integrated-momentum residual.
//!
//! All integrals are midpoint sums over interior cells, accumulated left to
//! right.

use crate::error::{Field, Result, SimError};
use crate::grid::N_GHOST;
use crate::operators::{d1_center, derived_fields};
use crate::params::SimParams;
use crate::state::FlowState;

fn require_positive(state: &FlowState) -> Result<()> {
    state.check_finite()?;
    for (field, values) in [
        (Field::V, state.v_interior()),
        (Field::Theta, state.theta_interior()),
    ] {
        if let Some(cell) = values.iter().position(|&x| !(x > 0.0)) {
            return Err(SimError::Positivity {
                field,
                cell,
                x: state.grid.x(cell),
                value: values[cell],
                t: state.t,
            });
        }
    }
    Ok(())
}

/// y - ln y - 1, the convex relative-entropy density.
#[inline]
pub fn relative_entropy(y: f64) -> f64 {
    y - y.ln() - 1.0
}

/// Σ (v - 1) dx.
pub fn mass_excess(state: &FlowState) -> f64 {
    state.v_interior().iter().map(|v| v - 1.0).sum::<f64>() * state.grid.dx()
}

/// Σ (u²/2 + c_v(θ - 1) + (φ² - 1)²/(4ε) + (ε/2) φ_x²/v) dx.
pub fn total_energy(state: &FlowState, params: &SimParams) -> f64 {
    let eps = params.epsilon;
    let phi_x = d1_center(&state.phi, &state.grid);
    let mut sum = 0.0;
    for i in 0..state.n_cells() {
        let j = i + N_GHOST;
        let (u, th, ph, v) = (state.u[j], state.theta[j], state.phi[j], state.v[j]);
        let w = ph * ph - 1.0;
        sum += 0.5 * u * u
            + params.c_v * (th - 1.0)
            + w * w / (4.0 * eps)
            + 0.5 * eps * phi_x[i] * phi_x[i] / v;
    }
    sum * state.grid.dx()
}

/// Σ (u²/2 + (φ² - 1)²/(4ε) + (ε/2) φ_x²/v + R(v - ln v - 1) + c_v(θ - ln θ - 1)) dx.
pub fn lyapunov_energy(state: &FlowState, params: &SimParams) -> Result<f64> {
    require_positive(state)?;
    let eps = params.epsilon;
    let phi_x = d1_center(&state.phi, &state.grid);
    let mut sum = 0.0;
    for i in 0..state.n_cells() {
        let j = i + N_GHOST;
        let (u, th, ph, v) = (state.u[j], state.theta[j], state.phi[j], state.v[j]);
        let w = ph * ph - 1.0;
        sum += 0.5 * u * u
            + w * w / (4.0 * eps)
            + 0.5 * eps * phi_x[i] * phi_x[i] / v
            + params.gas_r * relative_entropy(v)
            + params.c_v * relative_entropy(th);
    }
    Ok(sum * state.grid.dx())
}

/// V(t) = Σ (κ̃ θ^β θ_x²/(vθ²) + ν u_x²/(vθ) + v μ²/θ) dx.
pub fn dissipation_rate(state: &FlowState, params: &SimParams) -> Result<f64> {
    require_positive(state)?;
    let d = derived_fields(state, params);
    let theta_x = d1_center(&state.theta, &state.grid);
    let mut sum = 0.0;
    for i in 0..state.n_cells() {
        let j = i + N_GHOST;
        let (v, th) = (state.v[j], state.theta[j]);
        let (tx, ux, mu) = (theta_x[i], d.u_x[i], d.mu[i]);
        sum += params.conductivity(th) * tx * tx / (v * th * th)
            + params.nu * ux * ux / (v * th)
            + v * mu * mu / th;
    }
    Ok(sum * state.grid.dx())
}

/// The two roots α₁ ≤ 1 ≤ α₂ of y - ln y - 1 = e0, by bisection.
pub fn bracket_roots(e0: f64) -> Result<(f64, f64)> {
    if !(e0.is_finite() && e0 >= 0.0) {
        return Err(SimError::Precondition(format!(
            "bracket energy must be finite and >= 0, got {e0}"
        )));
    }
    if e0 == 0.0 {
        return Ok((1.0, 1.0));
    }
    let f = |y: f64| relative_entropy(y) - e0;

    // f(e^{-(e0+1)}) = e^{-(e0+1)} > 0
    // for large e0 that margin is below the roundoff of e0 itself
    let mut lo = (-(e0 + 1.0)).exp();
    while f(lo) <= 0.0 {
        lo *= 0.5;
    }
    let alpha1 = bisect(f, lo, 1.0);

    let mut hi = 2.0;
    while f(hi) <= 0.0 {
        hi *= 2.0;
    }
    let alpha2 = bisect(f, 1.0, hi);
    Ok((alpha1, alpha2))
}

/// Bisection on a sign change of `f` over [a, b], run to machine precision.
fn bisect(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64) -> f64 {
    let fa_pos = f(a) > 0.0;
    for _ in 0..2000 {
        let mid = 0.5 * (a + b);
        if mid <= a || mid >= b {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return mid;
        }
        if (fm > 0.0) == fa_pos {
            a = mid;
        } else {
            b = mid;
        }
    }
    if f(a).abs() <= f(b).abs() {
        a
    } else {
        b
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UnitAverage {
    /// Left end of the interval [n, n + 1].
    pub n: i64,
    pub v_bar: f64,
    pub theta_bar: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BracketReport {
    pub alpha1: f64,
    pub alpha2: f64,
    pub tolerance: f64,
    pub averages: Vec<UnitAverage>,
    pub violations: Vec<UnitAverage>,
}

/// Averages of v and θ over each unit interval of [-L, L], checked against
/// the roots of y - ln y - 1 = e0 with tolerance 1e-6 + dx².
pub fn cell_average_brackets(state: &FlowState, e0: f64) -> Result<BracketReport> {
    let grid = &state.grid;
    let l = grid.half_width();
    if (l - l.round()).abs() > 1e-12 * l.max(1.0) {
        return Err(SimError::Precondition(format!(
            "unit-interval averages need an integer half width, got {l}"
        )));
    }
    let (alpha1, alpha2) = bracket_roots(e0)?;
    let l = l.round() as i64;
    let dx = grid.dx();
    let count = (2 * l) as usize;
    let mut v_sum = vec![0.0; count];
    let mut t_sum = vec![0.0; count];
    let (v, theta) = (state.v_interior(), state.theta_interior());
    for i in 0..grid.n_cells() {
        let a = grid.x(i) - 0.5 * dx;
        let b = a + dx;
        let first = (a.floor() as i64).max(-l);
        let last = ((b.ceil() as i64) - 1).min(l - 1);
        for n in first..=last {
            let overlap = b.min((n + 1) as f64) - a.max(n as f64);
            if overlap > 0.0 {
                let k = (n + l) as usize;
                v_sum[k] += v[i] * overlap;
                t_sum[k] += theta[i] * overlap;
            }
        }
    }
    let tolerance = 1e-6 + dx * dx;
    let averages: Vec<UnitAverage> = (0..count)
        .map(|k| UnitAverage {
            n: k as i64 - l,
            v_bar: v_sum[k],
            theta_bar: t_sum[k],
        })
        .collect();
    let outside = |y: f64| y < alpha1 - tolerance || y > alpha2 + tolerance;
    let violations = averages
        .iter()
        .filter(|a| outside(a.v_bar) || outside(a.theta_bar))
        .copied()
        .collect();
    Ok(BracketReport {
        alpha1,
        alpha2,
        tolerance,
        averages,
        violations,
    })
}

/// Cut-off weight centered on the unit interval [n, n + 1]: 1 inside,
/// decaying like e^{-|distance|/2} outside.
pub fn cutoff_weight(n: i64, x: f64) -> f64 {
    let n = n as f64;
    if x <= n {
        (0.5 * (x - n)).exp()
    } else if x >= n + 1.0 {
        (0.5 * (n + 1.0 - x)).exp()
    } else {
        1.0
    }
}

/// Σ κ̃ θ^β θ_x² / (v θ^{α+1}) φₙ dx for 0 < α < 1.
pub fn weighted_dissipation(
    state: &FlowState,
    params: &SimParams,
    alpha: f64,
    n: i64,
) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.0) {
        return Err(SimError::Precondition(format!(
            "weighted dissipation exponent must lie in (0, 1), got {alpha}"
        )));
    }
    require_positive(state)?;
    let theta_x = d1_center(&state.theta, &state.grid);
    let (v, theta) = (state.v_interior(), state.theta_interior());
    let mut sum = 0.0;
    for i in 0..state.n_cells() {
        let th = theta[i];
        sum += params.conductivity(th) * theta_x[i] * theta_x[i] / (v[i] * th.powf(alpha + 1.0))
            * cutoff_weight(n, state.grid.x(i));
    }
    Ok(sum * state.grid.dx())
}

/// L² norm of the integrated momentum identity
/// ν (ln v - ln v₀)_x - G_x - (u - u₀), with central differences on cells
/// whose stencil lies inside the grid.
pub fn lemma24_residual(state: &FlowState, initial: &FlowState, params: &SimParams) -> Result<f64> {
    if !state.grid.same_layout(&initial.grid) {
        return Err(SimError::GridMismatch(format!(
            "state grid {:?} vs initial grid {:?}",
            state.grid, initial.grid
        )));
    }
    require_positive(state)?;
    require_positive(initial)?;
    let n = state.n_cells();
    let (v, v0) = (state.v_interior(), initial.v_interior());
    let (u, u0) = (state.u_interior(), initial.u_interior());
    let w: Vec<f64> = (0..n)
        .map(|i| params.nu * (v[i].ln() - v0[i].ln()) - state.g[i])
        .collect();
    let inv_2dx = 0.5 / state.grid.dx();
    let mut sum = 0.0;
    for i in 1..n - 1 {
        let r = (w[i + 1] - w[i - 1]) * inv_2dx - (u[i] - u0[i]);
        sum += r * r;
    }
    Ok((sum * state.grid.dx()).sqrt())
}

/// Cut-off weighted dissipation for one (α, n) pair: the instantaneous
/// value and its time integral so far.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WeightedDiss {
    pub alpha: f64,
    pub n: i64,
    pub rate: f64,
    pub integral: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticsRecord {
    pub t: f64,
    pub step: usize,
    pub mass_excess: f64,
    pub energy_total: f64,
    pub e_lyap: f64,
    pub v_diss: f64,
    /// ∫₀ᵗ V dτ by the trapezoid rule over accepted steps.
    pub cumulative_diss: f64,
    pub phi_min: f64,
    pub phi_max: f64,
    pub v_min: f64,
    pub v_max: f64,
    pub theta_min: f64,
    pub theta_max: f64,
    pub bracket_violations: usize,
    pub lemma24_residual: f64,
    pub weighted_diss: Vec<WeightedDiss>,
}

/// Run-level inputs that a record needs beyond the state itself.
#[derive(Debug, Clone, Copy)]
pub struct RecordContext<'a> {
    pub initial: &'a FlowState,
    /// Lyapunov energy of the initial state, for the average brackets.
    pub e0: f64,
    pub step: usize,
    pub cumulative_diss: f64,
    /// (α, n, time integral so far) per weighted-dissipation pair.
    pub weighted: &'a [(f64, i64, f64)],
}

fn extrema(values: &[f64]) -> (f64, f64) {
    values
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &x| {
            (lo.min(x), hi.max(x))
        })
}

pub fn record(
    state: &FlowState,
    params: &SimParams,
    ctx: &RecordContext<'_>,
) -> Result<DiagnosticsRecord> {
    let (phi_min, phi_max) = extrema(state.phi_interior());
    let (v_min, v_max) = extrema(state.v_interior());
    let (theta_min, theta_max) = extrema(state.theta_interior());
    let brackets = if state.grid.half_width().fract() == 0.0 {
        cell_average_brackets(state, ctx.e0)?.violations.len()
    } else {
        0
    };
    let weighted_diss = ctx
        .weighted
        .iter()
        .map(|&(alpha, n, integral)| {
            Ok(WeightedDiss {
                alpha,
                n,
                rate: weighted_dissipation(state, params, alpha, n)?,
                integral,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(DiagnosticsRecord {
        t: state.t,
        step: ctx.step,
        mass_excess: mass_excess(state),
        energy_total: total_energy(state, params),
        e_lyap: lyapunov_energy(state, params)?,
        v_diss: dissipation_rate(state, params)?,
        cumulative_diss: ctx.cumulative_diss,
        phi_min,
        phi_max,
        v_min,
        v_max,
        theta_min,
        theta_max,
        bracket_violations: brackets,
        lemma24_residual: lemma24_residual(state, ctx.initial, params)?,
        weighted_diss,
    })
}

/// Accumulates the time integrals (dissipation and weighted dissipation)
/// along a trajectory; feed it every accepted state in order.
#[derive(Debug, Clone)]
pub struct DiagnosticsTracker {
    params: SimParams,
    initial: FlowState,
    e0: f64,
    cumulative_diss: f64,
    weighted: Vec<(f64, i64, f64)>,
    last: Option<(f64, f64, Vec<f64>)>,
}

impl DiagnosticsTracker {
    pub fn new(initial: &FlowState, params: &SimParams, weighted: &[(f64, i64)]) -> Result<Self> {
        for &(alpha, _) in weighted {
            if !(alpha > 0.0 && alpha < 1.0) {
                return Err(SimError::Precondition(format!(
                    "weighted dissipation exponent must lie in (0, 1), got {alpha}"
                )));
            }
        }
        Ok(Self {
            params: *params,
            initial: initial.clone(),
            e0: lyapunov_energy(initial, params)?,
            cumulative_diss: 0.0,
            weighted: weighted.iter().map(|&(a, n)| (a, n, 0.0)).collect(),
            last: None,
        })
    }

    pub fn e0(&self) -> f64 {
        self.e0
    }

    pub fn cumulative_diss(&self) -> f64 {
        self.cumulative_diss
    }

    pub fn initial(&self) -> &FlowState {
        &self.initial
    }

    /// Advances the time integrals to `state.t`.
    pub fn observe(&mut self, state: &FlowState) -> Result<()> {
        let rate = dissipation_rate(state, &self.params)?;
        let wrates = self
            .weighted
            .iter()
            .map(|&(a, n, _)| weighted_dissipation(state, &self.params, a, n))
            .collect::<Result<Vec<_>>>()?;
        if let Some((t_prev, rate_prev, w_prev)) = &self.last {
            let dt = state.t - t_prev;
            self.cumulative_diss += 0.5 * (rate + rate_prev) * dt;
            for ((_, _, acc), (w, wp)) in self.weighted.iter_mut().zip(wrates.iter().zip(w_prev)) {
                *acc += 0.5 * (w + wp) * dt;
            }
        }
        self.last = Some((state.t, rate, wrates));
        Ok(())
    }

    pub fn record(&self, state: &FlowState, step: usize) -> Result<DiagnosticsRecord> {
        record(
            state,
            &self.params,
            &RecordContext {
                initial: &self.initial,
                e0: self.e0,
                step,
                cumulative_diss: self.cumulative_diss,
                weighted: &self.weighted,
            },
        )
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use crate::state::{equilibrium_state, BoundaryConfig};

    fn eq(l: f64, n: usize) -> FlowState {
        equilibrium_state(
            make_grid(l, n).unwrap(),
            &BoundaryConfig::uniform(1.0).unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn equilibrium_functionals_vanish() {
        let s = eq(4.0, 32);
        let p = SimParams::default();
        assert_eq!(lyapunov_energy(&s, &p).unwrap(), 0.0);
        assert_eq!(dissipation_rate(&s, &p).unwrap(), 0.0);
        assert_eq!(mass_excess(&s), 0.0);
        assert_eq!(total_energy(&s, &p), 0.0);
        assert_eq!(weighted_dissipation(&s, &p, 0.5, 0).unwrap(), 0.0);
        assert_eq!(lemma24_residual(&s, &s, &p).unwrap(), 0.0);
    }

    #[test]
    fn uniform_expansion_energy() {
        let mut s = eq(4.0, 32);
        s.v.iter_mut().for_each(|v| *v = 2.0);
        let e = lyapunov_energy(&s, &SimParams::default()).unwrap();
        let expect = (2.0 - 2f64.ln() - 1.0) * 8.0;
        assert!((e - expect).abs() < 1e-13, "{e} vs {expect}");
    }

    #[test]
    fn functionals_reject_non_positive_fields() {
        let mut s = eq(4.0, 32);
        s.theta[N_GHOST + 1] = 0.0;
        assert!(lyapunov_energy(&s, &SimParams::default()).is_err());
        assert!(dissipation_rate(&s, &SimParams::default()).is_err());
    }

    #[test]
    fn bracket_roots_trivial_values() {
        assert_eq!(bracket_roots(0.0).unwrap(), (1.0, 1.0));
        let (_, a2) = bracket_roots(std::f64::consts::E - 2.0).unwrap();
        assert!((a2 - std::f64::consts::E).abs() < 1e-10);
        assert!(bracket_roots(-1e-3).is_err());
        assert!(bracket_roots(f64::NAN).is_err());
    }

    #[test]
    fn bracket_roots_large_energy() {
        let (a1, a2) = bracket_roots(60.0).unwrap();
        assert!((relative_entropy(a1) - 60.0).abs() <= 1e-12 * 60.0);
        assert!((relative_entropy(a2) - 60.0).abs() <= 1e-12 * 60.0);
        assert!(a1 > 0.0 && a1 < 1.0 && a2 > 1.0);
    }

    #[test]
    fn cutoff_weight_branches() {
        assert_eq!(cutoff_weight(3, 3.0), 1.0);
        assert_eq!(cutoff_weight(3, 3.5), 1.0);
        assert_eq!(cutoff_weight(3, 4.0), 1.0);
        assert!((cutoff_weight(0, -2.0) - (-1f64).exp()).abs() < 1e-16);
        assert!((cutoff_weight(0, 3.0) - (-1f64).exp()).abs() < 1e-16);
    }

    #[test]
    fn weighted_dissipation_rejects_alpha_outside_unit_interval() {
        let s = eq(4.0, 32);
        for alpha in [0.0, 1.0, 1.5, -0.2] {
            assert!(weighted_dissipation(&s, &SimParams::default(), alpha, 0).is_err());
        }
    }

    #[test]
    fn brackets_on_equilibrium_and_breach() {
        let s = eq(4.0, 32);
        let r = cell_average_brackets(&s, 0.0).unwrap();
        assert_eq!(r.averages.len(), 8);
        assert!(r
            .averages
            .iter()
            .all(|a| a.v_bar == 1.0 && a.theta_bar == 1.0));
        assert!(r.violations.is_empty());

        let e0 = 0.5;
        let (_, a2) = bracket_roots(e0).unwrap();
        let mut big = s.clone();
        for j in N_GHOST..N_GHOST + 4 {
            big.v[j] = 2.0 * a2;
        }
        let r = cell_average_brackets(&big, e0).unwrap();
        assert_eq!(r.violations.len(), 1);
        assert_eq!(r.violations[0].n, -4);
        assert!((r.violations[0].v_bar - 2.0 * a2).abs() < 1e-12);
    }

    #[test]
    fn brackets_need_integer_half_width() {
        let s = eq(2.5, 32);
        assert!(cell_average_brackets(&s, 0.1).is_err());
    }

    #[test]
    fn residual_rejects_mismatched_grids() {
        assert!(matches!(
            lemma24_residual(&eq(4.0, 32), &eq(4.0, 64), &SimParams::default()),
            Err(SimError::GridMismatch(_))
        ));
    }

    #[test]
    fn equilibrium_record() {
        let s = eq(4.0, 32);
        let p = SimParams::default();
        let t = DiagnosticsTracker::new(&s, &p, &[(0.5, 0)]).unwrap();
        let r = t.record(&s, 0).unwrap();
        assert_eq!(
            (r.e_lyap, r.v_diss, r.energy_total, r.mass_excess),
            (0.0, 0.0, 0.0, 0.0)
        );
        assert_eq!(
            (r.phi_min, r.phi_max, r.v_min, r.theta_max),
            (1.0, 1.0, 1.0, 1.0)
        );
        assert_eq!(r.bracket_violations, 0);
        assert_eq!(r.weighted_diss[0].rate, 0.0);
    }
}
