//! Second-order collocated discretization of the 1-D Lagrangian system
//!
//! ```text
//! v_t = u_x
//! u_t = -(Rθ/v + (ε/2) φ_x²/v²)_x + ν (u_x/v)_x
//! φ_t = -v μ,        μ = (φ³ - φ)/ε - ε (φ_x/v)_x
//! c_v θ_t = -(Rθ/v) u_x + κ̃ (θ^β θ_x / v)_x + ν u_x²/v + v μ²
//! ```
//!
//! First derivatives are central differences; every `(a f_x)_x` term uses
//! the same flux-form stencil with face-averaged coefficients, so interior
//! sums telescope to the two outer faces.

use crate::error::Result;
use crate::grid::{MassGrid, N_GHOST};
use crate::params::{FaceMean, SimParams};
use crate::state::FlowState;

/// `(f[i+1] - f[i-1]) / (2 dx)` on interior cells of a padded array.
pub fn d1_center(f: &[f64], grid: &MassGrid) -> Vec<f64> {
    let inv = 0.5 / grid.dx();
    (N_GHOST..N_GHOST + grid.n_cells())
        .map(|j| (f[j + 1] - f[j - 1]) * inv)
        .collect()
}

/// Face values of a padded cell coefficient. Face `k` (0..=N) separates
/// interior cells `k - 1` and `k`; faces 0 and N touch the ghost layer.
pub fn face_coefficients(cell: &[f64], grid: &MassGrid, mean: FaceMean) -> Vec<f64> {
    (0..=grid.n_cells())
        .map(|k| {
            let j = k + N_GHOST;
            mean.combine(cell[j - 1], cell[j])
        })
        .collect()
}

/// `[a_{i+1/2}(f_{i+1} - f_i) - a_{i-1/2}(f_i - f_{i-1})] / dx²` on interior
/// cells, with `a_face` from [`face_coefficients`].
pub fn diffusion_flux(a_face: &[f64], f: &[f64], grid: &MassGrid) -> Vec<f64> {
    debug_assert_eq!(a_face.len(), grid.n_cells() + 1);
    let inv = 1.0 / (grid.dx() * grid.dx());
    (0..grid.n_cells())
        .map(|i| {
            let j = i + N_GHOST;
            (a_face[i + 1] * (f[j + 1] - f[j]) - a_face[i] * (f[j] - f[j - 1])) * inv
        })
        .collect()
}

/// Per-state quantities shared by the right-hand side and the diagnostics.
#[derive(Debug, Clone, PartialEq)]
pub struct DerivedFields {
    /// Chemical potential μ on interior cells.
    pub mu: Vec<f64>,
    /// Rθ/v + (ε/2)(φ_x/v)², padded; valid on every cell that has both
    /// neighbours, the outermost ghosts hold the far-field value R.
    pub p_eff: Vec<f64>,
    /// φ_x / v on interior cells.
    pub phi_x_over_v: Vec<f64>,
    /// κ̃ θ^β / v averaged onto the N + 1 faces.
    pub kappa_face: Vec<f64>,
    /// 1 / v averaged onto the N + 1 faces.
    pub visc_face: Vec<f64>,
    /// Central u_x on interior cells.
    pub u_x: Vec<f64>,
}

pub fn derived_fields(state: &FlowState, params: &SimParams) -> DerivedFields {
    let grid = &state.grid;
    let len = grid.padded_len();
    let inv_2dx = 0.5 / grid.dx();

    let inv_v: Vec<f64> = state.v.iter().map(|v| 1.0 / v).collect();
    let kappa_cell: Vec<f64> = state
        .theta
        .iter()
        .zip(&inv_v)
        .map(|(&th, iv)| params.conductivity(th) * iv)
        .collect();
    let visc_face = face_coefficients(&inv_v, grid, params.face_mean);
    let kappa_face = face_coefficients(&kappa_cell, grid, params.face_mean);

    let mut p_eff = vec![params.gas_r; len];
    for j in 1..len - 1 {
        let phi_x = (state.phi[j + 1] - state.phi[j - 1]) * inv_2dx;
        let q = phi_x * inv_v[j];
        p_eff[j] = params.gas_r * state.theta[j] * inv_v[j] + 0.5 * params.epsilon * q * q;
    }

    let phi_x = d1_center(&state.phi, grid);
    let phi_x_over_v: Vec<f64> = phi_x
        .iter()
        .zip(grid.interior(&inv_v))
        .map(|(px, iv)| px * iv)
        .collect();

    let mu = chemical_potential_with(&state.phi, &visc_face, grid, params.epsilon);
    let u_x = d1_center(&state.u, grid);

    DerivedFields {
        mu,
        p_eff,
        phi_x_over_v,
        kappa_face,
        visc_face,
        u_x,
    }
}

fn chemical_potential_with(phi: &[f64], visc_face: &[f64], grid: &MassGrid, eps: f64) -> Vec<f64> {
    let lap = diffusion_flux(visc_face, phi, grid);
    grid.interior(phi)
        .iter()
        .zip(lap)
        .map(|(&p, l)| (p * p * p - p) / eps - eps * l)
        .collect()
}

/// μ = (φ³ - φ)/ε - ε (φ_x / v)_x with the flux-form stencil.
pub fn chemical_potential(state: &FlowState, params: &SimParams) -> Vec<f64> {
    let inv_v: Vec<f64> = state.v.iter().map(|v| 1.0 / v).collect();
    let visc_face = face_coefficients(&inv_v, &state.grid, params.face_mean);
    chemical_potential_with(&state.phi, &visc_face, &state.grid, params.epsilon)
}

/// Time derivatives of every state field on interior cells.
#[derive(Debug, Clone, PartialEq)]
pub struct Rhs {
    pub dv: Vec<f64>,
    pub du: Vec<f64>,
    pub dtheta: Vec<f64>,
    pub dphi: Vec<f64>,
    pub dg: Vec<f64>,
}

impl Rhs {
    pub fn zeros(n: usize) -> Self {
        Self {
            dv: vec![0.0; n],
            du: vec![0.0; n],
            dtheta: vec![0.0; n],
            dphi: vec![0.0; n],
            dg: vec![0.0; n],
        }
    }
}

/// Semi-discrete right-hand side. Ghost cells must already hold boundary
/// values; v or θ at or below `positivity_floor` is a hard error.
pub fn semi_discrete_rhs(state: &FlowState, params: &SimParams) -> Result<Rhs> {
    state.check_finite()?;
    state.check_positivity(params.positivity_floor)?;

    let grid = &state.grid;
    let d = derived_fields(state, params);

    let dv = d1_center(&state.u, grid);
    let grad_p = d1_center(&d.p_eff, grid);
    let visc = diffusion_flux(&d.visc_face, &state.u, grid);
    let cond = diffusion_flux(&d.kappa_face, &state.theta, grid);

    let n = grid.n_cells();
    let v = state.v_interior();
    let theta = state.theta_interior();
    let mut rhs = Rhs::zeros(n);
    rhs.dv = dv;
    for i in 0..n {
        let (vi, ti, ux, mu) = (v[i], theta[i], d.u_x[i], d.mu[i]);
        rhs.du[i] = -grad_p[i] + params.nu * visc[i];
        rhs.dphi[i] = -vi * mu;
        rhs.dtheta[i] =
            (-(params.gas_r * ti / vi) * ux + cond[i] + params.nu * ux * ux / vi + vi * mu * mu)
                / params.c_v;
        rhs.dg[i] = d.p_eff[i + N_GHOST];
    }
    Ok(rhs)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::error::{Field, SimError};
    use crate::grid::make_grid;
    use crate::state::{equilibrium_state, BoundaryConfig};

    fn padded_from(grid: &MassGrid, f: impl Fn(f64) -> f64) -> Vec<f64> {
        (0..grid.padded_len())
            .map(|j| f(grid.x_padded(j)))
            .collect()
    }

    #[test]
    fn d1_center_exact_on_low_degree() {
        let g = make_grid(1.0, 8).unwrap();
        assert!(d1_center(&padded_from(&g, |_| 3.0), &g)
            .iter()
            .all(|&d| d == 0.0));
        for d in d1_center(&padded_from(&g, |x| x), &g) {
            assert!((d - 1.0).abs() < 1e-14);
        }
        for (i, d) in d1_center(&padded_from(&g, |x| x * x), &g)
            .iter()
            .enumerate()
        {
            assert!((d - 2.0 * g.x(i)).abs() < 1e-14);
        }
    }

    #[test]
    fn diffusion_flux_exact_on_quadratic() {
        let g = make_grid(1.0, 8).unwrap();
        let ones = vec![1.0; g.n_cells() + 1];
        assert!(diffusion_flux(&ones, &padded_from(&g, |_| 2.0), &g)
            .iter()
            .all(|&d| d == 0.0));
        for d in diffusion_flux(&ones, &padded_from(&g, |x| x * x), &g) {
            assert!((d - 2.0).abs() < 1e-12, "{d}");
        }
    }

    #[test]
    fn chemical_potential_of_linear_phase() {
        let g = make_grid(1.0, 8).unwrap();
        let bc = BoundaryConfig::uniform(1.0).unwrap();
        let mut s = equilibrium_state(g, &bc).unwrap();
        s.phi = padded_from(&g, |x| x);
        let mu = chemical_potential(&s, &SimParams::default());
        for (i, m) in mu.iter().enumerate() {
            let x = g.x(i);
            assert!((m - (x * x * x - x)).abs() < 1e-12);
        }
    }

    #[test]
    fn chemical_potential_vanishes_on_pure_phases() {
        let g = make_grid(1.0, 8).unwrap();
        for phase in [1.0, -1.0] {
            let s = equilibrium_state(g, &BoundaryConfig::uniform(phase).unwrap()).unwrap();
            assert!(chemical_potential(&s, &SimParams::default())
                .iter()
                .all(|&m| m == 0.0));
        }
    }

    #[test]
    fn rhs_vanishes_at_equilibrium() {
        let g = make_grid(2.0, 16).unwrap();
        for phase in [1.0, -1.0] {
            let s = equilibrium_state(g, &BoundaryConfig::uniform(phase).unwrap()).unwrap();
            let r = semi_discrete_rhs(&s, &SimParams::default()).unwrap();
            for arr in [&r.dv, &r.du, &r.dtheta, &r.dphi] {
                assert!(arr.iter().all(|&x| x == 0.0));
            }
            assert!(r.dg.iter().all(|&x| x == 1.0));
        }
    }

    #[test]
    fn rhs_names_the_offending_cell() {
        let g = make_grid(2.0, 16).unwrap();
        let mut s = equilibrium_state(g, &BoundaryConfig::uniform(1.0).unwrap()).unwrap();
        s.theta[N_GHOST + 5] = -0.1;
        match semi_discrete_rhs(&s, &SimParams::default()) {
            Err(SimError::Positivity { field, cell, .. }) => {
                assert_eq!(field, Field::Theta);
                assert_eq!(cell, 5);
            }
            other => panic!("expected positivity error, got {other:?}"),
        }
        s.theta[N_GHOST + 5] = 1.0;
        s.v[N_GHOST + 3] = 0.0;
        let err = semi_discrete_rhs(&s, &SimParams::default()).unwrap_err();
        assert!(err.to_string().contains("v = 0e0 in cell 3"), "{err}");
    }
}
