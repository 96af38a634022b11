//! Python bindings: `import pysyncrds`.
//!
//! Escaped states are returned as `float('inf')` / `float('-inf')`. Invalid
//! parameters raise `ValueError`; escaped Lyapunov orbits raise
//! `EscapedOrbitError`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use syncrds::attractor::{
    dual_exceedance_curve, pullback_diameter, stable_probe_curve, unstable_probe_curve,
};
use syncrds::maps::{f_eval, g_eval};
use syncrds::{cocycle, oracle, selftest, Ensemble, Error, Estimate, ExtReal, Family, NoiseAtom, NoiseSource};

create_exception!(pysyncrds, EscapedOrbitError, PyRuntimeError);

fn to_py(e: Error) -> PyErr {
    match e {
        Error::EscapedOrbit { .. } => EscapedOrbitError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn family(name: &str) -> PyResult<Family> {
    name.parse().map_err(to_py)
}

fn atom(k: u64) -> PyResult<NoiseAtom> {
    NoiseAtom::new(k).map_err(to_py)
}

fn ensemble(workers: usize) -> PyResult<Ensemble> {
    Ensemble::new(workers).map_err(to_py)
}

fn estimates<'py>(py: Python<'py>, checkpoints: &[usize], est: &[Estimate]) -> PyResult<Vec<Bound<'py, PyDict>>> {
    checkpoints
        .iter()
        .zip(est)
        .map(|(&n, e)| {
            let d = PyDict::new(py);
            d.set_item("n", n)?;
            d.set_item("value", e.value)?;
            d.set_item("std_err", e.std_err)?;
            d.set_item("half_width", e.half_width)?;
            Ok(d)
        })
        .collect()
}

/// A counter-based two-sided i.i.d. noise path.
#[pyclass(name = "NoisePath", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyNoisePath(syncrds::NoisePath);

#[pymethods]
impl PyNoisePath {
    #[new]
    fn new(seed: u64) -> Self {
        Self(syncrds::NoisePath::new(seed))
    }

    /// The independent path used for ensemble sample `sample`.
    #[staticmethod]
    fn for_sample(seed: u64, sample: u64) -> Self {
        Self(syncrds::NoisePath::for_sample(seed, sample))
    }

    /// Exponent `k` of the atom `xi = 2^-k` at `index`.
    fn exponent(&self, index: i64) -> u64 {
        self.0.atom(index).exponent()
    }

    fn exponents(&self, start: i64, count: usize) -> Vec<u64> {
        (0..count as i64).map(|i| self.0.atom(start + i).exponent()).collect()
    }

    fn shift(&self, r: i64) -> Self {
        Self(self.0.shift(r))
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.0.seed()
    }

    #[getter]
    fn offset(&self) -> i64 {
        self.0.offset()
    }

    fn __repr__(&self) -> String {
        format!("NoisePath(seed={}, offset={})", self.0.seed(), self.0.offset())
    }
}

/// A stored forward trajectory.
#[pyclass(name = "Orbit", frozen, get_all)]
struct PyOrbit {
    family: String,
    states: Vec<f64>,
    exponents: Vec<u64>,
    log2_deriv_sum: i64,
    escaped_at: Option<usize>,
}

#[pymethods]
impl PyOrbit {
    fn __len__(&self) -> usize {
        self.states.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "Orbit(family={}, steps={}, escaped_at={:?})",
            self.family,
            self.exponents.len(),
            self.escaped_at
        )
    }
}

#[pyfunction]
fn sample_exponent(u: f64) -> PyResult<u64> {
    syncrds::sample_exponent(u).map_err(to_py)
}

/// `g(z, 2^-k)`; escaped values come back as `+-inf`.
#[pyfunction(name = "g_eval")]
fn py_g_eval(z: f64, k: u64) -> PyResult<f64> {
    Ok(g_eval(z, atom(k)?).to_f64())
}

/// `f(y, 2^-k)`, the inverse of `g`.
#[pyfunction(name = "f_eval")]
fn py_f_eval(y: f64, k: u64) -> PyResult<f64> {
    Ok(f_eval(y, atom(k)?))
}

#[pyfunction]
fn forward_orbit(family_name: &str, path: &PyNoisePath, z0: f64, n: usize) -> PyResult<PyOrbit> {
    let o = syncrds::forward_orbit(family(family_name)?, &path.0, z0, n);
    Ok(PyOrbit {
        family: o.family.to_string(),
        states: o.states.iter().map(|s| s.to_f64()).collect(),
        exponents: o.atoms.iter().map(|a| a.exponent()).collect(),
        log2_deriv_sum: o.log2_deriv_sum,
        escaped_at: o.escaped_at,
    })
}

/// `phi_n(theta_{-n} omega, z0)`.
#[pyfunction]
fn pullback_state(family_name: &str, path: &PyNoisePath, z0: f64, n: usize) -> PyResult<f64> {
    Ok(cocycle::pullback_state(family(family_name)?, &path.0, ExtReal::Finite(z0), n).to_f64())
}

#[pyfunction]
fn finite_time_lyapunov(family_name: &str, path: &PyNoisePath, z0: f64, n: usize) -> PyResult<f64> {
    syncrds::finite_time_lyapunov(family(family_name)?, &path.0, z0, n)
        .map(|e| e.value)
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (k, z0, checkpoints, samples, seed=0, workers=1))]
fn survival_curve<'py>(
    py: Python<'py>,
    k: u64,
    z0: f64,
    checkpoints: Vec<usize>,
    samples: u64,
    seed: u64,
    workers: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let c = syncrds::survival_curve(k, z0, &checkpoints, samples, seed, &ensemble(workers)?).map_err(to_py)?;
    c.rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("p_hat", r.p_hat)?;
            d.set_item("half_width", r.half_width)?;
            d.set_item("bound", r.bound)?;
            Ok(d)
        })
        .collect()
}

#[pyfunction(name = "pullback_diameter")]
fn py_pullback_diameter(path: &PyNoisePath, radius: f64, n: usize) -> f64 {
    pullback_diameter(&path.0, radius, n)
}

#[pyfunction]
#[pyo3(signature = (radius, epsilon, checkpoints, samples, seed=0, workers=1))]
fn pullback_diameter_curve<'py>(
    py: Python<'py>,
    radius: f64,
    epsilon: f64,
    checkpoints: Vec<usize>,
    samples: u64,
    seed: u64,
    workers: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let c = syncrds::pullback_diameter_curve(radius, epsilon, &checkpoints, samples, seed, &ensemble(workers)?)
        .map_err(to_py)?;
    c.rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("p_exceed", r.p_exceed)?;
            d.set_item("half_width", r.half_width)?;
            d.set_item("median_diameter", r.median_diameter)?;
            Ok(d)
        })
        .collect()
}

/// `P(|G_n(epsilon/2)| < radius)`, the forward dual of the exceedance curve.
#[pyfunction]
#[pyo3(signature = (radius, epsilon, checkpoints, samples, seed=0, workers=1))]
fn dual_exceedance<'py>(
    py: Python<'py>,
    radius: f64,
    epsilon: f64,
    checkpoints: Vec<usize>,
    samples: u64,
    seed: u64,
    workers: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let e = dual_exceedance_curve(radius, epsilon, &checkpoints, samples, seed, &ensemble(workers)?).map_err(to_py)?;
    estimates(py, &checkpoints, &e)
}

#[pyfunction]
#[pyo3(signature = (family_name, samples, k0=20, seed=0))]
fn integrability_diagnostic<'py>(
    py: Python<'py>,
    family_name: &str,
    samples: u64,
    k0: u64,
    seed: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let r = syncrds::integrability_diagnostic(family(family_name)?, samples, k0, seed).map_err(to_py)?;
    let d = PyDict::new(py);
    let running: Vec<(u64, f64)> = r.running_means.iter().map(|m| (m.samples, m.mean)).collect();
    d.set_item("running_means", running)?;
    d.set_item("truncated", r.truncated.value)?;
    d.set_item("truncated_std_err", r.truncated.std_err)?;
    d.set_item("analytic_truncated", r.analytic_truncated)?;
    d.set_item("fixed_point_log_slope", r.fixed_point_log_slope)?;
    Ok(d)
}

#[pyfunction]
fn stable_set_probe(family_name: &str, path: &PyNoisePath, x: f64, y: f64, mu: f64, beta: f64, n: usize) -> PyResult<bool> {
    Ok(syncrds::stable_set_probe(family(family_name)?, &path.0, x, y, mu, beta, n))
}

/// Returns the first step at which the backward orbit leaves the
/// `beta e^{-mu m}` envelope, or `None`.
#[pyfunction]
fn unstable_set_probe(family_name: &str, path: &PyNoisePath, x0: f64, mu: f64, beta: f64, n: usize) -> PyResult<Option<usize>> {
    Ok(syncrds::unstable_set_probe(family(family_name)?, &path.0, x0, mu, beta, n).exit_step)
}

#[pyfunction]
#[pyo3(signature = (family_name, x, y, mu, beta, checkpoints, samples, seed=0, workers=1))]
#[allow(clippy::too_many_arguments)]
fn stable_probe_fractions<'py>(
    py: Python<'py>,
    family_name: &str,
    x: f64,
    y: f64,
    mu: f64,
    beta: f64,
    checkpoints: Vec<usize>,
    samples: u64,
    seed: u64,
    workers: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let e = stable_probe_curve(family(family_name)?, x, y, mu, beta, &checkpoints, samples, seed, &ensemble(workers)?)
        .map_err(to_py)?;
    estimates(py, &checkpoints, &e)
}

#[pyfunction]
#[pyo3(signature = (family_name, x0, mu, beta, checkpoints, samples, seed=0, workers=1))]
#[allow(clippy::too_many_arguments)]
fn unstable_probe_fractions<'py>(
    py: Python<'py>,
    family_name: &str,
    x0: f64,
    mu: f64,
    beta: f64,
    checkpoints: Vec<usize>,
    samples: u64,
    seed: u64,
    workers: usize,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let e = unstable_probe_curve(family(family_name)?, x0, mu, beta, &checkpoints, samples, seed, &ensemble(workers)?)
        .map_err(to_py)?;
    estimates(py, &checkpoints, &e)
}

/// `k/(k+n)` as `(numerator, denominator)` in lowest terms.
#[pyfunction]
fn survival_bound(k: u64, n: u64) -> PyResult<(u64, u64)> {
    let r = oracle::survival_bound(k, n).map_err(to_py)?;
    Ok((*r.numer(), *r.denom()))
}

#[pyfunction]
fn exact_exponent(family_name: &str) -> PyResult<f64> {
    Ok(oracle::exact_exponent(family(family_name)?))
}

#[pyfunction]
#[pyo3(signature = (k0=None))]
fn truncated_log_moment(k0: Option<u64>) -> PyResult<f64> {
    oracle::truncated_log_moment(k0).map_err(to_py)
}

/// Runs the invariant suite; returns `(name, passed, detail)` triples.
#[pyfunction(name = "selftest")]
#[pyo3(signature = (seed=0))]
fn py_selftest(seed: u64) -> Vec<(String, bool, String)> {
    selftest::run(seed)
        .into_iter()
        .map(|c| (c.name.to_string(), c.passed, c.detail))
        .collect()
}

#[pymodule]
fn pysyncrds(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", syncrds::VERSION)?;
    m.add("EscapedOrbitError", m.py().get_type::<EscapedOrbitError>())?;
    m.add_class::<PyNoisePath>()?;
    m.add_class::<PyOrbit>()?;
    m.add_function(wrap_pyfunction!(sample_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(py_g_eval, m)?)?;
    m.add_function(wrap_pyfunction!(py_f_eval, m)?)?;
    m.add_function(wrap_pyfunction!(forward_orbit, m)?)?;
    m.add_function(wrap_pyfunction!(pullback_state, m)?)?;
    m.add_function(wrap_pyfunction!(finite_time_lyapunov, m)?)?;
    m.add_function(wrap_pyfunction!(survival_curve, m)?)?;
    m.add_function(wrap_pyfunction!(py_pullback_diameter, m)?)?;
    m.add_function(wrap_pyfunction!(pullback_diameter_curve, m)?)?;
    m.add_function(wrap_pyfunction!(dual_exceedance, m)?)?;
    m.add_function(wrap_pyfunction!(integrability_diagnostic, m)?)?;
    m.add_function(wrap_pyfunction!(stable_set_probe, m)?)?;
    m.add_function(wrap_pyfunction!(unstable_set_probe, m)?)?;
    m.add_function(wrap_pyfunction!(stable_probe_fractions, m)?)?;
    m.add_function(wrap_pyfunction!(unstable_probe_fractions, m)?)?;
    m.add_function(wrap_pyfunction!(survival_bound, m)?)?;
    m.add_function(wrap_pyfunction!(exact_exponent, m)?)?;
    m.add_function(wrap_pyfunction!(truncated_log_moment, m)?)?;
    m.add_function(wrap_pyfunction!(py_selftest, m)?)?;
    Ok(())
}
