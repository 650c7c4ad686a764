//! Python bindings for the macrospin toolkit.
//!
//! Vectors cross the boundary as 3-tuples, matrices as 3x3 nested lists,
//! and estimator series as plain lists, so the module needs nothing beyond
//! the Python standard library on the other side.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use macrospin::algebra::{self, Mat3, Vec3};
use macrospin::dynamics::{
    exact_alpha0_path, simulate_path, ModelKind, ModelSpec, SchemeKind, SchemeSpec,
};
use macrospin::montecarlo::{
    estimate_gap_moment, estimate_mean_state, martingale_moment_alpha0, EnsembleConfig,
    RecordTimes,
};
use macrospin::schedule::NoiseSchedule;

type Triple = (f64, f64, f64);

fn vec3(t: Triple) -> Vec3 {
    Vec3::new(t.0, t.1, t.2)
}

fn triple(v: Vec3) -> Triple {
    (v.x, v.y, v.z)
}

fn rows(m: Mat3) -> [[f64; 3]; 3] {
    m.0
}

fn parse_model(kind: &str) -> PyResult<ModelKind> {
    match kind {
        "deterministic" => Ok(ModelKind::Deterministic),
        "rescaled-ito" => Ok(ModelKind::RescaledIto),
        "pullback-ito" => Ok(ModelKind::PullbackIto),
        "stratonovich" => Ok(ModelKind::StratonovichIto),
        "alpha0-exact" => Ok(ModelKind::Alpha0Exact),
        _ => Err(PyValueError::new_err(format!("unknown model kind `{kind}`"))),
    }
}

fn parse_scheme(kind: &str) -> PyResult<SchemeKind> {
    match kind {
        "explicit-euler" => Ok(SchemeKind::ExplicitEuler),
        "projected-euler" => Ok(SchemeKind::ProjectedEuler),
        "semi-implicit-midpoint" => Ok(SchemeKind::SemiImplicitMidpoint),
        _ => Err(PyValueError::new_err(format!("unknown scheme kind `{kind}`"))),
    }
}

fn build_schedule(eps0: f64, beta: f64) -> PyResult<NoiseSchedule> {
    if !(eps0 > 0.0 && eps0.is_finite()) {
        return Err(PyValueError::new_err(format!("eps0 must be positive, got {eps0}")));
    }
    if !(beta >= 0.0 && beta.is_finite()) {
        return Err(PyValueError::new_err(format!("beta must be non-negative, got {beta}")));
    }
    Ok(if beta == 0.0 {
        NoiseSchedule::constant(eps0)
    } else {
        NoiseSchedule::power_law(eps0, beta)
    })
}

/// Noise magnitude schedule `eps_t = eps0 / (t + 1)**beta` (constant when
/// `beta == 0`).
#[pyclass(name = "Schedule", skip_from_py_object)]
#[derive(Clone)]
struct PySchedule {
    inner: NoiseSchedule,
}

#[pymethods]
impl PySchedule {
    #[new]
    #[pyo3(signature = (eps0, beta = 0.0))]
    fn new(eps0: f64, beta: f64) -> PyResult<Self> {
        Ok(PySchedule { inner: build_schedule(eps0, beta)? })
    }

    fn eval(&self, t: f64) -> f64 {
        self.inner.eval(t)
    }

    /// Closed-form `int_{t0}^{t1} eps_u**gamma du`; `t1 = None` means
    /// infinity (returns `inf` when the tail diverges).
    #[pyo3(signature = (gamma, t0 = 0.0, t1 = None))]
    fn integral_pow(&self, gamma: f64, t0: f64, t1: Option<f64>) -> f64 {
        self.inner.integral_pow(gamma, t0, t1.unwrap_or(f64::INFINITY))
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let c = self.inner.classify();
        let d = PyDict::new(py);
        d.set_item("l2_finite", c.l2_finite)?;
        d.set_item("l4_finite", c.l4_finite)?;
        d.set_item("gamma_star", c.gamma_star)?;
        d.set_item("rate_hypothesis_ok", c.rate_hypothesis_ok)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("Schedule(eps0={}, beta={})", self.inner.eps0(), self.inner.beta())
    }
}

/// Antisymmetric cross-product matrix `L(x)` with `L(x) @ y == cross(x, y)`.
#[pyfunction]
fn cross_matrix(x: Triple) -> [[f64; 3]; 3] {
    rows(algebra::cross_matrix(vec3(x)))
}

/// Effective field operator `alpha |x|^2 I - alpha x x^T - L(x)`.
#[pyfunction]
fn effective_operator(x: Triple, alpha: f64) -> [[f64; 3]; 3] {
    rows(algebra::effective_operator(vec3(x), alpha))
}

/// Rotation `exp(L(b) t)` about `b/|b|` by angle `|b| t`.
#[pyfunction]
fn rotation_exp(b: Triple, t: f64) -> [[f64; 3]; 3] {
    rows(algebra::rotation_exp(vec3(b), t))
}

/// Closed form `-2 (alpha^2 |x|^2 + 1) x` of the Stratonovich-to-Ito drift
/// correction kernel.
#[pyfunction]
fn strato_drift_correction(x: Triple, alpha: f64) -> Triple {
    triple(algebra::strato_drift_correction(vec3(x), alpha))
}

/// Finite-difference evaluation of the same kernel, for cross-checking.
#[pyfunction]
#[pyo3(signature = (x, alpha, h = 1e-5))]
fn fd_drift_correction(x: Triple, alpha: f64, h: f64) -> Triple {
    triple(macrospin::oracles::fd_drift_correction(vec3(x), alpha, h))
}

/// Deterministic norm `h(t) = sqrt(2 eps^2 (alpha^2+1) t + 1)` of the
/// unrescaled Ito process.
#[pyfunction]
fn h_of_t(eps: f64, alpha: f64, t: f64) -> f64 {
    macrospin::dynamics::h_of_t(eps, alpha, t)
}

fn build_model(kind: &str, b: Triple, alpha: f64, eps0: f64, beta: f64) -> PyResult<ModelSpec> {
    let model = ModelSpec {
        kind: parse_model(kind)?,
        b: vec3(b),
        alpha,
        schedule: build_schedule(eps0, beta)?,
    };
    model.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(model)
}

/// Simulates one path; returns a dict with `times`, `states` (list of
/// 3-tuples) and `norm_drift`.
#[pyfunction]
#[pyo3(signature = (model, b, alpha, eps0, beta, x0, t_final, dt, seed,
                    scheme = "projected-euler"))]
#[allow(clippy::too_many_arguments)]
fn simulate<'py>(
    py: Python<'py>,
    model: &str,
    b: Triple,
    alpha: f64,
    eps0: f64,
    beta: f64,
    x0: Triple,
    t_final: f64,
    dt: f64,
    seed: u64,
    scheme: &str,
) -> PyResult<Bound<'py, PyDict>> {
    let model = build_model(model, b, alpha, eps0, beta)?;
    let scheme = SchemeSpec::new(parse_scheme(scheme)?, dt);
    let traj = py
        .detach(|| simulate_path(&model, &scheme, vec3(x0), t_final, seed))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("times", &traj.times)?;
    d.set_item("states", traj.states.iter().map(|&s| triple(s)).collect::<Vec<_>>())?;
    d.set_item("norm_drift", traj.norm_drift)?;
    Ok(d)
}

fn record_from(record_times: Option<Vec<f64>>, n_record: usize) -> RecordTimes {
    match record_times {
        Some(ts) => RecordTimes::Explicit(ts),
        None => RecordTimes::LogSpaced(n_record),
    }
}

/// Monte Carlo mean of `(|b| - mu_t.b)**p * eps_t**(-2p)` under the
/// Stratonovich model; returns `(times, mean, stderr)`.
#[pyfunction]
#[pyo3(signature = (b, alpha, eps0, beta, x0, t_final, dt, n_paths, seed, p = 1,
                    scheme = "projected-euler", record_times = None, n_record = 50))]
#[allow(clippy::too_many_arguments)]
fn gap_moment(
    py: Python<'_>,
    b: Triple,
    alpha: f64,
    eps0: f64,
    beta: f64,
    x0: Triple,
    t_final: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
    p: u32,
    scheme: &str,
    record_times: Option<Vec<f64>>,
    n_record: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let cfg = EnsembleConfig {
        model: build_model("stratonovich", b, alpha, eps0, beta)?,
        scheme: SchemeSpec::new(parse_scheme(scheme)?, dt),
        x0: vec3(x0),
        t_final,
        n_paths,
        master_seed: seed,
        record: record_from(record_times, n_record),
    };
    let s = py
        .detach(|| estimate_gap_moment(&cfg, p))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((s.times, s.mean, s.std_error))
}

/// Componentwise Monte Carlo mean of the state; returns
/// `(times, means, pooled_stderr)` with means as 3-tuples.
#[pyfunction]
#[pyo3(signature = (model, b, alpha, eps0, beta, x0, t_final, dt, n_paths, seed,
                    scheme = "projected-euler", record_times = None, n_record = 50))]
#[allow(clippy::too_many_arguments)]
fn mean_state(
    py: Python<'_>,
    model: &str,
    b: Triple,
    alpha: f64,
    eps0: f64,
    beta: f64,
    x0: Triple,
    t_final: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
    scheme: &str,
    record_times: Option<Vec<f64>>,
    n_record: usize,
) -> PyResult<(Vec<f64>, Vec<Triple>, Vec<f64>)> {
    let cfg = EnsembleConfig {
        model: build_model(model, b, alpha, eps0, beta)?,
        scheme: SchemeSpec::new(parse_scheme(scheme)?, dt),
        x0: vec3(x0),
        t_final,
        n_paths,
        master_seed: seed,
        record: record_from(record_times, n_record),
    };
    let s = py
        .detach(|| estimate_mean_state(&cfg))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((s.times, s.mean.iter().map(|&m| triple(m)).collect(), s.std_error))
}

/// Monte Carlo mean of `||N_t||**(2p)` over exact alpha = 0 paths with its
/// theoretical curve; returns `(times, mean, stderr, curve)`.
#[pyfunction]
#[pyo3(signature = (b, eps0, beta, x0, t_final, dt, n_paths, seed, p = 1,
                    record_times = None, n_record = 50))]
#[allow(clippy::too_many_arguments)]
fn martingale_moment(
    py: Python<'_>,
    b: Triple,
    eps0: f64,
    beta: f64,
    x0: Triple,
    t_final: f64,
    dt: f64,
    n_paths: usize,
    seed: u64,
    p: u32,
    record_times: Option<Vec<f64>>,
    n_record: usize,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>, Vec<f64>)> {
    let cfg = EnsembleConfig {
        model: build_model("alpha0-exact", b, 0.0, eps0, beta)?,
        scheme: SchemeSpec::explicit_euler(dt),
        x0: vec3(x0),
        t_final,
        n_paths,
        master_seed: seed,
        record: record_from(record_times, n_record),
    };
    let mm = py
        .detach(|| martingale_moment_alpha0(&cfg, p))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok((mm.series.times, mm.series.mean, mm.series.std_error, mm.bound))
}

/// One exact alpha = 0 path; returns a dict with `times`, `states`,
/// `martingale` and `norm_drift`.
#[pyfunction]
#[pyo3(signature = (b, eps0, beta, x0, t_final, dt, seed))]
#[allow(clippy::too_many_arguments)]
fn alpha0_path<'py>(
    py: Python<'py>,
    b: Triple,
    eps0: f64,
    beta: f64,
    x0: Triple,
    t_final: f64,
    dt: f64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let schedule = build_schedule(eps0, beta)?;
    let path = py
        .detach(|| exact_alpha0_path(&schedule, vec3(b), vec3(x0), t_final, dt, seed))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    let d = PyDict::new(py);
    d.set_item("times", &path.trajectory.times)?;
    d.set_item(
        "states",
        path.trajectory.states.iter().map(|&s| triple(s)).collect::<Vec<_>>(),
    )?;
    d.set_item(
        "martingale",
        path.martingale.iter().map(|&s| triple(s)).collect::<Vec<_>>(),
    )?;
    d.set_item("norm_drift", path.trajectory.norm_drift)?;
    Ok(d)
}

#[pymodule]
fn macrospin_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySchedule>()?;
    m.add_function(wrap_pyfunction!(cross_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(effective_operator, m)?)?;
    m.add_function(wrap_pyfunction!(rotation_exp, m)?)?;
    m.add_function(wrap_pyfunction!(strato_drift_correction, m)?)?;
    m.add_function(wrap_pyfunction!(fd_drift_correction, m)?)?;
    m.add_function(wrap_pyfunction!(h_of_t, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(gap_moment, m)?)?;
    m.add_function(wrap_pyfunction!(mean_state, m)?)?;
    m.add_function(wrap_pyfunction!(martingale_moment, m)?)?;
    m.add_function(wrap_pyfunction!(alpha0_path, m)?)?;
    Ok(())
}
