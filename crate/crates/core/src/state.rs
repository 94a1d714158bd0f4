use crate::error::{Field, Result, SimError};
use crate::grid::{MassGrid, N_GHOST};

/// Far-field phases at x → -∞ and x → +∞.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryConfig {
    phi_left: f64,
    phi_right: f64,
}

impl BoundaryConfig {
    pub fn new(phi_left: f64, phi_right: f64) -> Result<Self> {
        let unit = |p: f64| p == 1.0 || p == -1.0;
        if !unit(phi_left) || !unit(phi_right) {
            return Err(SimError::InvalidBoundary {
                left: phi_left,
                right: phi_right,
            });
        }
        Ok(Self {
            phi_left,
            phi_right,
        })
    }

    pub fn uniform(phase: f64) -> Result<Self> {
        Self::new(phase, phase)
    }

    pub fn phi_left(&self) -> f64 {
        self.phi_left
    }

    pub fn phi_right(&self) -> f64 {
        self.phi_right
    }

    pub fn negated(&self) -> Self {
        Self {
            phi_left: -self.phi_left,
            phi_right: -self.phi_right,
        }
    }
}

/// Cell-centered fields at one time level.
///
/// `v`, `u`, `theta` and `phi` are padded with `N_GHOST` ghost cells per
/// side; `g` holds only interior cells and accumulates
/// ∫₀ᵗ (Rθ/v + (ε/2) φ_x²/v²) dτ.
#[derive(Debug, Clone, PartialEq)]
pub struct FlowState {
    pub grid: MassGrid,
    pub t: f64,
    pub v: Vec<f64>,
    pub u: Vec<f64>,
    pub theta: Vec<f64>,
    pub phi: Vec<f64>,
    pub g: Vec<f64>,
}

impl FlowState {
    /// Builds a state at t = 0 from closed-form interior profiles; ghosts
    /// are set from `bc`.
    pub fn from_profiles<F>(grid: MassGrid, bc: &BoundaryConfig, mut profile: F) -> Self
    where
        F: FnMut(f64) -> [f64; 4],
    {
        let len = grid.padded_len();
        let mut state = Self {
            grid,
            t: 0.0,
            v: vec![1.0; len],
            u: vec![0.0; len],
            theta: vec![1.0; len],
            phi: vec![0.0; len],
            g: vec![0.0; grid.n_cells()],
        };
        for i in 0..grid.n_cells() {
            let [v, u, theta, phi] = profile(grid.x(i));
            let j = i + N_GHOST;
            state.v[j] = v;
            state.u[j] = u;
            state.theta[j] = theta;
            state.phi[j] = phi;
        }
        state.fill_ghosts(bc);
        state
    }

    /// Sets ghost cells to the far-field values (1, 0, 1, ±1).
    pub fn fill_ghosts(&mut self, bc: &BoundaryConfig) {
        let n = self.grid.n_cells();
        for k in 0..N_GHOST {
            let right = N_GHOST + n + k;
            self.v[k] = 1.0;
            self.v[right] = 1.0;
            self.u[k] = 0.0;
            self.u[right] = 0.0;
            self.theta[k] = 1.0;
            self.theta[right] = 1.0;
            self.phi[k] = bc.phi_left;
            self.phi[right] = bc.phi_right;
        }
    }

    pub fn n_cells(&self) -> usize {
        self.grid.n_cells()
    }

    pub fn v_interior(&self) -> &[f64] {
        self.grid.interior(&self.v)
    }

    pub fn u_interior(&self) -> &[f64] {
        self.grid.interior(&self.u)
    }

    pub fn theta_interior(&self) -> &[f64] {
        self.grid.interior(&self.theta)
    }

    pub fn phi_interior(&self) -> &[f64] {
        self.grid.interior(&self.phi)
    }

    /// First interior cell with a non-finite value, if any.
    pub fn check_finite(&self) -> Result<()> {
        let fields = [
            (Field::V, self.v_interior()),
            (Field::U, self.u_interior()),
            (Field::Theta, self.theta_interior()),
            (Field::Phi, self.phi_interior()),
            (Field::G, self.g.as_slice()),
        ];
        for (field, values) in fields {
            if let Some(cell) = values.iter().position(|x| !x.is_finite()) {
                return Err(SimError::NonFinite {
                    field,
                    cell,
                    t: self.t,
                });
            }
        }
        Ok(())
    }

    /// v and θ must stay strictly above `floor` in every interior cell.
    pub fn check_positivity(&self, floor: f64) -> Result<()> {
        for (field, values) in [
            (Field::V, self.v_interior()),
            (Field::Theta, self.theta_interior()),
        ] {
            if let Some(cell) = values.iter().position(|&x| !(x > floor)) {
                return Err(SimError::Positivity {
                    field,
                    cell,
                    x: self.grid.x(cell),
                    value: values[cell],
                    t: self.t,
                });
            }
        }
        Ok(())
    }

    /// The same state with φ replaced by -φ (ghosts included).
    pub fn with_negated_phase(&self) -> Self {
        let mut out = self.clone();
        out.phi.iter_mut().for_each(|p| *p = -*p);
        out
    }
}

/// Constant far-field state v = 1, u = 0, θ = 1, φ = ±1.
pub fn equilibrium_state(grid: MassGrid, bc: &BoundaryConfig) -> Result<FlowState> {
    if bc.phi_left != bc.phi_right {
        return Err(SimError::MismatchedPhases {
            left: bc.phi_left,
            right: bc.phi_right,
        });
    }
    let phase = bc.phi_left;
    Ok(FlowState::from_profiles(grid, bc, |_| {
        [1.0, 0.0, 1.0, phase]
    }))
}

/// Gaussian bump `amplitude * exp(-((x - center) / width)^2)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Bump {
    pub amplitude: f64,
    pub center: f64,
    pub width: f64,
}

impl Bump {
    pub const ZERO: Bump = Bump {
        amplitude: 0.0,
        center: 0.0,
        width: 1.0,
    };

    pub fn new(amplitude: f64, center: f64, width: f64) -> Self {
        Self {
            amplitude,
            center,
            width,
        }
    }

    #[inline]
    pub fn eval(&self, x: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        let s = (x - self.center) / self.width;
        self.amplitude * (-s * s).exp()
    }
}

/// Shape of the interface initial data: a tanh phase profile plus localized
/// bumps in v, u and θ.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Perturbation {
    pub interface_width: f64,
    pub interface_center: f64,
    pub v: Bump,
    pub u: Bump,
    pub theta: Bump,
}

impl Default for Perturbation {
    fn default() -> Self {
        Self {
            interface_width: 1.0,
            interface_center: 0.0,
            v: Bump::new(0.5, -2.0, 1.0),
            u: Bump::new(0.3, 0.0, 1.0),
            theta: Bump::new(0.3, 2.0, 1.0),
        }
    }
}

impl Perturbation {
    pub fn quiet() -> Self {
        Self {
            v: Bump::ZERO,
            u: Bump::ZERO,
            theta: Bump::ZERO,
            ..Self::default()
        }
    }

    /// Phase profile joining `phi_left` to `phi_right`.
    pub fn phase(&self, bc: &BoundaryConfig, x: f64) -> f64 {
        if bc.phi_left == bc.phi_right {
            return bc.phi_left;
        }
        let s = ((x - self.interface_center) / self.interface_width).tanh();
        0.5 * ((bc.phi_right + bc.phi_left) + (bc.phi_right - bc.phi_left) * s)
    }

    pub fn fields(&self, bc: &BoundaryConfig, x: f64) -> [f64; 4] {
        [
            1.0 + self.v.eval(x),
            self.u.eval(x),
            1.0 + self.theta.eval(x),
            self.phase(bc, x),
        ]
    }
}

/// Far-field mismatch tolerated at the outermost interior cells.
pub const FAR_FIELD_TOL: f64 = 1e-12;

pub fn interface_initial_state(
    grid: MassGrid,
    bc: &BoundaryConfig,
    pert: &Perturbation,
    positivity_floor: f64,
) -> Result<FlowState> {
    let widths = [
        ("interface_width", pert.interface_width),
        ("v_bump_width", pert.v.width),
        ("u_bump_width", pert.u.width),
        ("theta_bump_width", pert.theta.width),
    ];
    for (name, w) in widths {
        if !(w.is_finite() && w > 0.0) {
            return Err(SimError::InvalidParameter {
                name,
                reason: format!("must be finite and > 0, got {w}"),
            });
        }
    }
    let state = FlowState::from_profiles(grid, bc, |x| pert.fields(bc, x));
    state.check_finite()?;
    state.check_positivity(positivity_floor)?;
    if let Some(cell) = state.phi_interior().iter().position(|p| p.abs() > 1.0) {
        return Err(SimError::Precondition(format!(
            "initial phase outside [-1, 1] in cell {cell}"
        )));
    }

    let n = grid.n_cells();
    for (cell, phase) in [(0, bc.phi_left), (n - 1, bc.phi_right)] {
        let j = cell + N_GHOST;
        let dev = [
            state.v[j] - 1.0,
            state.u[j],
            state.theta[j] - 1.0,
            state.phi[j] - phase,
        ];
        if dev.iter().any(|d| d.abs() > FAR_FIELD_TOL) {
            return Err(SimError::Precondition(format!(
                "perturbation does not reach the far field at cell {cell} (deviations {dev:?}); \
                 narrow the bumps/interface or enlarge the domain"
            )));
        }
    }
    Ok(state)
}
