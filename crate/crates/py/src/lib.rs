//! Python module `nsac`: parameters, grids and states, stepping, the
//! diagnostics functionals, the manufactured-solution study and the
//! config-driven runner.

use std::path::PathBuf;

use nsac_core::io::{self as nio, IoError};
use nsac_core::{
    cell_average_brackets, convergence_study, equilibrium_state, interface_initial_state,
    BoundaryConfig, Bump, DiagnosticsRecord, DiagnosticsTracker, FaceMean, FlowState,
    ManufacturedCase, MassGrid, Perturbation, SimError, SimParams,
};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

type UnitAverages = (f64, f64, Vec<(i64, f64, f64)>, usize);
type AuditRow = (String, String, String);

create_exception!(
    nsac,
    SimulationError,
    PyException,
    "A simulation precondition or invariant guard failed."
);

fn sim_err(e: SimError) -> PyErr {
    match e {
        SimError::InvalidParameter { .. }
        | SimError::InvalidGrid(_)
        | SimError::InvalidBoundary { .. }
        | SimError::MismatchedPhases { .. } => PyValueError::new_err(e.to_string()),
        _ => SimulationError::new_err(e.to_string()),
    }
}

fn io_err(e: IoError) -> PyErr {
    match e {
        IoError::Io { .. } => pyo3::exceptions::PyOSError::new_err(e.to_string()),
        IoError::Parse { .. } | IoError::Config(_) => PyValueError::new_err(e.to_string()),
        _ => SimulationError::new_err(e.to_string()),
    }
}

/// Physical and numerical parameters.
#[pyclass(name = "Params", module = "nsac", skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: SimParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (epsilon=1.0, beta=1.0, nu=1.0, gas_r=1.0, c_v=1.0, kappa_tilde=1.0, cfl=0.4, t_final=1.0, positivity_floor=1e-10, harmonic_faces=false))]
    #[allow(clippy::too_many_arguments)]
    fn new(
        epsilon: f64,
        beta: f64,
        nu: f64,
        gas_r: f64,
        c_v: f64,
        kappa_tilde: f64,
        cfl: f64,
        t_final: f64,
        positivity_floor: f64,
        harmonic_faces: bool,
    ) -> PyResult<Self> {
        let inner = SimParams {
            epsilon,
            beta,
            nu,
            gas_r,
            c_v,
            kappa_tilde,
            cfl,
            t_final,
            positivity_floor,
            face_mean: if harmonic_faces {
                FaceMean::Harmonic
            } else {
                FaceMean::Arithmetic
            },
        };
        inner.validate().map_err(sim_err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn epsilon(&self) -> f64 {
        self.inner.epsilon
    }
    #[getter]
    fn beta(&self) -> f64 {
        self.inner.beta
    }
    #[getter]
    fn nu(&self) -> f64 {
        self.inner.nu
    }
    #[getter]
    fn gas_r(&self) -> f64 {
        self.inner.gas_r
    }
    #[getter]
    fn c_v(&self) -> f64 {
        self.inner.c_v
    }
    #[getter]
    fn kappa_tilde(&self) -> f64 {
        self.inner.kappa_tilde
    }
    #[getter]
    fn cfl(&self) -> f64 {
        self.inner.cfl
    }
    #[getter]
    fn t_final(&self) -> f64 {
        self.inner.t_final
    }
    #[getter]
    fn gamma(&self) -> f64 {
        self.inner.gamma()
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.inner)
    }
}

/// Uniform cell-centred grid on [-L, L].
#[pyclass(name = "Grid", module = "nsac", skip_from_py_object)]
#[derive(Clone)]
struct PyGrid {
    inner: MassGrid,
}

#[pymethods]
impl PyGrid {
    #[new]
    fn new(half_width: f64, n_cells: usize) -> PyResult<Self> {
        Ok(Self {
            inner: MassGrid::new(half_width, n_cells).map_err(sim_err)?,
        })
    }

    #[getter]
    fn half_width(&self) -> f64 {
        self.inner.half_width()
    }
    #[getter]
    fn n_cells(&self) -> usize {
        self.inner.n_cells()
    }
    #[getter]
    fn dx(&self) -> f64 {
        self.inner.dx()
    }
    #[getter]
    fn centers(&self) -> Vec<f64> {
        self.inner.centers()
    }

    fn __repr__(&self) -> String {
        format!(
            "Grid(half_width={}, n_cells={})",
            self.inner.half_width(),
            self.inner.n_cells()
        )
    }
}

/// Simulation state; field accessors return interior cells only.
#[pyclass(name = "State", module = "nsac", skip_from_py_object)]
#[derive(Clone)]
struct PyState {
    inner: FlowState,
    bc: BoundaryConfig,
}

#[pymethods]
impl PyState {
    /// The constant state (1, 0, 1, phase).
    #[staticmethod]
    #[pyo3(signature = (grid, phase=1.0))]
    fn equilibrium(grid: PyRef<'_, PyGrid>, phase: f64) -> PyResult<Self> {
        let bc = BoundaryConfig::uniform(phase).map_err(sim_err)?;
        Ok(Self {
            inner: equilibrium_state(grid.inner, &bc).map_err(sim_err)?,
            bc,
        })
    }

    /// tanh phase interface plus Gaussian bumps (amplitude, center, width)
    /// in v, u and θ.
    #[staticmethod]
    #[pyo3(signature = (grid, phi_left=-1.0, phi_right=1.0, interface_width=1.0, interface_center=0.0, v_bump=(0.5, -2.0, 1.0), u_bump=(0.3, 0.0, 1.0), theta_bump=(0.3, 2.0, 1.0), positivity_floor=1e-10))]
    #[allow(clippy::too_many_arguments)]
    fn interface(
        grid: PyRef<'_, PyGrid>,
        phi_left: f64,
        phi_right: f64,
        interface_width: f64,
        interface_center: f64,
        v_bump: (f64, f64, f64),
        u_bump: (f64, f64, f64),
        theta_bump: (f64, f64, f64),
        positivity_floor: f64,
    ) -> PyResult<Self> {
        let bc = BoundaryConfig::new(phi_left, phi_right).map_err(sim_err)?;
        let bump = |(a, c, w): (f64, f64, f64)| Bump::new(a, c, w);
        let pert = Perturbation {
            interface_width,
            interface_center,
            v: bump(v_bump),
            u: bump(u_bump),
            theta: bump(theta_bump),
        };
        Ok(Self {
            inner: interface_initial_state(grid.inner, &bc, &pert, positivity_floor)
                .map_err(sim_err)?,
            bc,
        })
    }

    #[getter]
    fn t(&self) -> f64 {
        self.inner.t
    }
    #[getter]
    fn grid(&self) -> PyGrid {
        PyGrid {
            inner: self.inner.grid,
        }
    }
    #[getter]
    fn v(&self) -> Vec<f64> {
        self.inner.v_interior().to_vec()
    }
    #[getter]
    fn u(&self) -> Vec<f64> {
        self.inner.u_interior().to_vec()
    }
    #[getter]
    fn theta(&self) -> Vec<f64> {
        self.inner.theta_interior().to_vec()
    }
    #[getter]
    fn phi(&self) -> Vec<f64> {
        self.inner.phi_interior().to_vec()
    }
    #[getter]
    fn g(&self) -> Vec<f64> {
        self.inner.g.clone()
    }
    #[getter]
    fn phi_left(&self) -> f64 {
        self.bc.phi_left()
    }
    #[getter]
    fn phi_right(&self) -> f64 {
        self.bc.phi_right()
    }

    fn __repr__(&self) -> String {
        format!(
            "State(t={}, n_cells={}, phases=({}, {}))",
            self.inner.t,
            self.inner.n_cells(),
            self.bc.phi_left(),
            self.bc.phi_right()
        )
    }
}

fn record_dict<'py>(py: Python<'py>, r: &DiagnosticsRecord) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("t", r.t)?;
    d.set_item("step", r.step)?;
    d.set_item("mass_excess", r.mass_excess)?;
    d.set_item("energy_total", r.energy_total)?;
    d.set_item("e_lyap", r.e_lyap)?;
    d.set_item("v_diss", r.v_diss)?;
    d.set_item("cumulative_diss", r.cumulative_diss)?;
    d.set_item("phi_min", r.phi_min)?;
    d.set_item("phi_max", r.phi_max)?;
    d.set_item("v_min", r.v_min)?;
    d.set_item("v_max", r.v_max)?;
    d.set_item("theta_min", r.theta_min)?;
    d.set_item("theta_max", r.theta_max)?;
    d.set_item("bracket_violations", r.bracket_violations)?;
    d.set_item("lemma24_residual", r.lemma24_residual)?;
    let wd: Vec<(f64, i64, f64, f64)> = r
        .weighted_diss
        .iter()
        .map(|w| (w.alpha, w.n, w.rate, w.integral))
        .collect();
    d.set_item("weighted_diss", wd)?;
    Ok(d)
}

/// Roots α₁ ≤ 1 ≤ α₂ of y - ln y - 1 = e0.
#[pyfunction]
fn bracket_roots(e0: f64) -> PyResult<(f64, f64)> {
    nsac_core::bracket_roots(e0).map_err(sim_err)
}

/// Stable time step and the name of the binding limit.
#[pyfunction]
fn stable_dt(state: PyRef<'_, PyState>, params: PyRef<'_, PyParams>) -> PyResult<(f64, String)> {
    let (dt, kind) = nsac_core::stable_dt(&state.inner, &params.inner).map_err(sim_err)?;
    Ok((dt, format!("{kind:?}").to_lowercase()))
}

/// One Heun step; `dt` defaults to the stable step.
#[pyfunction]
#[pyo3(signature = (state, params, dt=None))]
fn step(
    state: PyRef<'_, PyState>,
    params: PyRef<'_, PyParams>,
    dt: Option<f64>,
) -> PyResult<(PyState, f64)> {
    let bc = state.bc;
    let (next, dt) = match dt {
        Some(dt) => (
            nsac_core::step_dt(&state.inner, &params.inner, &bc, dt).map_err(sim_err)?,
            dt,
        ),
        None => nsac_core::step(&state.inner, &params.inner, &bc).map_err(sim_err)?,
    };
    Ok((PyState { inner: next, bc }, dt))
}

/// Integrates to `t_final` (default `params.t_final`), returning the final
/// state and a diagnostics record every `record_every` steps plus the
/// first and last.
#[pyfunction]
#[pyo3(signature = (state, params, t_final=None, record_every=10, weighted_pairs=vec![(0.5, 0)]))]
fn run<'py>(
    py: Python<'py>,
    state: PyRef<'_, PyState>,
    params: PyRef<'_, PyParams>,
    t_final: Option<f64>,
    record_every: usize,
    weighted_pairs: Vec<(f64, i64)>,
) -> PyResult<(PyState, Vec<Bound<'py, PyDict>>)> {
    let p = params.inner;
    let bc = state.bc;
    let initial = state.inner.clone();
    let t_final = t_final.unwrap_or(p.t_final);
    let every = record_every.max(1);
    let outcome = py.detach(move || {
        let mut tracker = DiagnosticsTracker::new(&initial, &p, &weighted_pairs)?;
        let mut records = Vec::new();
        let mut failure = None;
        let result = nsac_core::run(initial, &p, &bc, t_final, 1, |s, c| {
            if failure.is_some() {
                return;
            }
            let last = s.t >= t_final;
            let res = tracker.observe(s).and_then(|_| {
                if c.step_count % every == 0 || last {
                    records.push(tracker.record(s, c.step_count)?);
                }
                Ok(())
            });
            if let Err(e) = res {
                failure = Some(e);
            }
        });
        if let Some(e) = failure {
            return Err(e);
        }
        match result {
            Ok(out) => Ok((out.state, records)),
            Err(e) => Err(e.source),
        }
    });
    let (fin, records) = outcome.map_err(sim_err)?;
    let dicts = records
        .iter()
        .map(|r| record_dict(py, r))
        .collect::<PyResult<Vec<_>>>()?;
    Ok((PyState { inner: fin, bc }, dicts))
}

#[pyfunction]
fn mass_excess(state: PyRef<'_, PyState>) -> f64 {
    nsac_core::mass_excess(&state.inner)
}

#[pyfunction]
fn total_energy(state: PyRef<'_, PyState>, params: PyRef<'_, PyParams>) -> f64 {
    nsac_core::total_energy(&state.inner, &params.inner)
}

#[pyfunction]
fn lyapunov_energy(state: PyRef<'_, PyState>, params: PyRef<'_, PyParams>) -> PyResult<f64> {
    nsac_core::lyapunov_energy(&state.inner, &params.inner).map_err(sim_err)
}

#[pyfunction]
fn dissipation_rate(state: PyRef<'_, PyState>, params: PyRef<'_, PyParams>) -> PyResult<f64> {
    nsac_core::dissipation_rate(&state.inner, &params.inner).map_err(sim_err)
}

#[pyfunction]
fn weighted_dissipation(
    state: PyRef<'_, PyState>,
    params: PyRef<'_, PyParams>,
    alpha: f64,
    n: i64,
) -> PyResult<f64> {
    nsac_core::weighted_dissipation(&state.inner, &params.inner, alpha, n).map_err(sim_err)
}

#[pyfunction]
fn chemical_potential(state: PyRef<'_, PyState>, params: PyRef<'_, PyParams>) -> Vec<f64> {
    nsac_core::chemical_potential(&state.inner, &params.inner)
}

#[pyfunction]
fn lemma24_residual(
    state: PyRef<'_, PyState>,
    initial: PyRef<'_, PyState>,
    params: PyRef<'_, PyParams>,
) -> PyResult<f64> {
    nsac_core::lemma24_residual(&state.inner, &initial.inner, &params.inner).map_err(sim_err)
}

/// (α₁, α₂, [(n, v̄, θ̄) per unit interval], number of violations).
#[pyfunction]
fn unit_averages(state: PyRef<'_, PyState>, e0: f64) -> PyResult<UnitAverages> {
    let r = cell_average_brackets(&state.inner, e0).map_err(sim_err)?;
    let avgs = r
        .averages
        .iter()
        .map(|a| (a.n, a.v_bar, a.theta_bar))
        .collect();
    Ok((r.alpha1, r.alpha2, avgs, r.violations.len()))
}

/// Manufactured-solution study; rows are (N, errors, orders or None).
#[pyfunction]
#[pyo3(signature = (params, resolutions=vec![128, 256, 512], half_width=16.0, amplitude=0.1, t_final=0.5))]
#[allow(clippy::type_complexity)]
fn mms_convergence(
    py: Python<'_>,
    params: PyRef<'_, PyParams>,
    resolutions: Vec<usize>,
    half_width: f64,
    amplitude: f64,
    t_final: f64,
) -> PyResult<Vec<(usize, [f64; 4], Option<[f64; 4]>)>> {
    let case = ManufacturedCase {
        amplitude,
        interface: true,
        half_width,
        params: params.inner,
        t_final,
    };
    let table = py
        .detach(|| convergence_study(&case, &resolutions))
        .map_err(sim_err)?;
    Ok(table
        .rows
        .into_iter()
        .map(|r| (r.n, r.errors, r.orders))
        .collect())
}

/// Runs a config file as `nsac run` does; returns (final time, steps,
/// output directory).
#[pyfunction]
fn run_config(py: Python<'_>, path: PathBuf) -> PyResult<(f64, usize, PathBuf)> {
    let text = std::fs::read_to_string(&path).map_err(|e| {
        io_err(IoError::Io {
            path: path.clone(),
            source: e,
        })
    })?;
    let cfg = nio::parse_config(&text).map_err(|e| io_err(e.into()))?;
    let summary = py.detach(|| nio::run_simulation(&cfg)).map_err(io_err)?;
    Ok((summary.final_time, summary.steps, summary.output_dir))
}

/// Audits a diagnostics CSV; returns (passed, [(name, status, detail)]).
#[pyfunction]
fn audit(path: PathBuf) -> PyResult<(bool, Vec<AuditRow>)> {
    let records = nio::read_diagnostics(&path).map_err(io_err)?;
    let report = nio::audit_records(&records);
    let rows = report
        .checks
        .iter()
        .map(|c| (c.name.to_string(), c.status.to_string(), c.detail.clone()))
        .collect();
    Ok((report.passed(), rows))
}

/// Adds the module contents to `m`; also used to embed the module.
pub fn register(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SimulationError", m.py().get_type::<SimulationError>())?;
    m.add_class::<PyParams>()?;
    m.add_class::<PyGrid>()?;
    m.add_class::<PyState>()?;
    m.add_function(wrap_pyfunction!(bracket_roots, m)?)?;
    m.add_function(wrap_pyfunction!(stable_dt, m)?)?;
    m.add_function(wrap_pyfunction!(step, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(mass_excess, m)?)?;
    m.add_function(wrap_pyfunction!(total_energy, m)?)?;
    m.add_function(wrap_pyfunction!(lyapunov_energy, m)?)?;
    m.add_function(wrap_pyfunction!(dissipation_rate, m)?)?;
    m.add_function(wrap_pyfunction!(weighted_dissipation, m)?)?;
    m.add_function(wrap_pyfunction!(chemical_potential, m)?)?;
    m.add_function(wrap_pyfunction!(lemma24_residual, m)?)?;
    m.add_function(wrap_pyfunction!(unit_averages, m)?)?;
    m.add_function(wrap_pyfunction!(mms_convergence, m)?)?;
    m.add_function(wrap_pyfunction!(run_config, m)?)?;
    m.add_function(wrap_pyfunction!(audit, m)?)?;
    Ok(())
}

#[pymodule]
fn nsac(m: &Bound<'_, PyModule>) -> PyResult<()> {
    register(m)
}
