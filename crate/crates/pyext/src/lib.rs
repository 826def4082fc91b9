//! Python bindings: thin wrappers over the core solvers returning plain
//! Python scalars, tuples, and dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use stopbound::amput::{eep_value, solve_boundary, GridConfig, PutParams};
use stopbound::invest2d::{fit_boundary, FitConfig};
use stopbound::GbmParams;

fn err(e: stopbound::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Optimal perpetual-put threshold and exponents for a one-factor model.
#[pyfunction]
fn solve_perpetual(py: Python<'_>, mu: f64, a: f64, r: f64, strike: f64) -> PyResult<Py<PyDict>> {
    let params = GbmParams::new_1d(mu, a, r, strike).map_err(err)?;
    let sol = stopbound::perpetual::solve_perpetual(&params).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("x_star", sol.x_star)?;
    d.set_item("gamma", sol.gamma)?;
    d.set_item("lambda_plus", sol.lambda_plus)?;
    d.set_item("lambda_minus", sol.lambda_minus)?;
    Ok(d.into())
}

/// Perpetual-put value at spot x.
#[pyfunction]
fn perpetual_value(x: f64, mu: f64, a: f64, r: f64, strike: f64) -> PyResult<f64> {
    let params = GbmParams::new_1d(mu, a, r, strike).map_err(err)?;
    let sol = stopbound::perpetual::solve_perpetual(&params).map_err(err)?;
    stopbound::perpetual::perpetual_value(x, &sol).map_err(err)
}

/// Kernel-integral candidate value of a one-factor threshold rule.
#[pyfunction]
fn candidate_value_1d(
    threshold: f64,
    x: f64,
    mu: f64,
    a: f64,
    r: f64,
    strike: f64,
) -> PyResult<f64> {
    let params = GbmParams::new_1d(mu, a, r, strike).map_err(err)?;
    stopbound::riesz::candidate_value_1d(threshold, x, &params).map_err(err)
}

/// Modified Bessel function K0.
#[pyfunction]
fn bessel_k0(u: f64) -> PyResult<f64> {
    stopbound::special::bessel_k0(u).map_err(err)
}

/// American put boundary on a uniform grid: returns (times, boundary values).
#[pyfunction]
#[pyo3(signature = (r, vol, strike, horizon, steps = 200))]
fn put_boundary(
    r: f64,
    vol: f64,
    strike: f64,
    horizon: f64,
    steps: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let p = PutParams::new(r, vol, strike, horizon).map_err(err)?;
    let b = solve_boundary(&p, &GridConfig { steps, cluster_near_expiry: false }).map_err(err)?;
    Ok((b.t, b.b))
}

/// American put value decomposition at (s, x).
#[pyfunction]
#[pyo3(signature = (s, x, r, vol, strike, horizon, steps = 200))]
#[allow(clippy::too_many_arguments)]
fn put_value(
    py: Python<'_>,
    s: f64,
    x: f64,
    r: f64,
    vol: f64,
    strike: f64,
    horizon: f64,
    steps: usize,
) -> PyResult<Py<PyDict>> {
    let p = PutParams::new(r, vol, strike, horizon).map_err(err)?;
    let b = solve_boundary(&p, &GridConfig { steps, cluster_near_expiry: false }).map_err(err)?;
    let v = eep_value(s, x, &b, &p).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("total", v.total)?;
    d.set_item("premium", v.premium)?;
    d.set_item("european", v.european)?;
    Ok(d.into())
}

/// Fits the two-factor superellipse stopping boundary; returns a dict with
/// the boundary parameters and the residual norms.
#[pyfunction]
#[pyo3(signature = (mu, a, rho, r, strike, n_collocation = 6))]
fn fit_boundary_2d(
    py: Python<'_>,
    mu: (f64, f64),
    a: (f64, f64),
    rho: f64,
    r: f64,
    strike: f64,
    n_collocation: usize,
) -> PyResult<Py<PyDict>> {
    let params = GbmParams::new(
        vec![mu.0, mu.1],
        vec![a.0, a.1],
        vec![vec![1.0, rho], vec![rho, 1.0]],
        r,
        strike,
    )
    .map_err(err)?;
    let cfg = FitConfig { n_collocation, ..FitConfig::default() };
    let fit = fit_boundary(&params, &cfg).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("p1", fit.boundary.p1)?;
    d.set_item("p2", fit.boundary.p2)?;
    d.set_item("q", fit.boundary.q)?;
    d.set_item("residual_sup", fit.report.sup_abs)?;
    d.set_item("residual_l2", fit.report.l2)?;
    Ok(d.into())
}

#[pymodule]
fn stopbound_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(solve_perpetual, m)?)?;
    m.add_function(wrap_pyfunction!(perpetual_value, m)?)?;
    m.add_function(wrap_pyfunction!(candidate_value_1d, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_k0, m)?)?;
    m.add_function(wrap_pyfunction!(put_boundary, m)?)?;
    m.add_function(wrap_pyfunction!(put_value, m)?)?;
    m.add_function(wrap_pyfunction!(fit_boundary_2d, m)?)?;
    Ok(())
}
