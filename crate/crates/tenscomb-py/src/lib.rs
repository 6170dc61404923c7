//! Python bindings. Values that are exact rationals cross the boundary as
//! `"num/den"` strings so nothing is rounded on the way.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use tenscomb::gem_core::json::parse_graph;
use tenscomb::gem_core::{amplitude_exponent, gem_degree};
use tenscomb::knot_gem::{knot_report, parse_pd, KnotMode};
use tenscomb::melonic_series::{fuss_catalan as fc, series_fixed_point, FixedPointEquation};
use tenscomb::verify::{parse_suite, run_suite, thread_pool};
use tenscomb::{Error, ErrorKind};

fn to_py(e: Error) -> PyErr {
    match e.kind() {
        ErrorKind::Internal => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Runs the command line with `args` (without the program name) and returns
/// `(stdout, stderr, exit_code)`. Usage and domain errors raise instead.
#[pyfunction]
fn run(args: Vec<String>) -> PyResult<(String, String, i32)> {
    let argv = std::iter::once("tenscomb".to_string()).chain(args);
    let out = tenscomb::cli::run(argv).map_err(to_py)?;
    Ok((out.stdout, out.stderr, out.code))
}

#[pyfunction]
fn fuss_catalan(d: u64, p: u64) -> String {
    let r = fc(d, p);
    format!("{}/{}", r.numer(), r.denom())
}

/// Coefficients of the melonic two-point series up to `order`.
#[pyfunction]
fn melonic_series(d: usize, order: usize) -> PyResult<Vec<String>> {
    let s = series_fixed_point(&FixedPointEquation::melonic(d), order).map_err(value_err)?;
    Ok(s.coeffs().iter().map(|c| format!("{}/{}", c.numer(), c.denom())).collect())
}

/// Degree of a graph given in the JSON graph format.
#[pyfunction]
fn degree(graph_json: &str) -> PyResult<u64> {
    let g = parse_graph(graph_json).map_err(value_err)?.into_graph().map_err(value_err)?;
    gem_degree(&g).map_err(value_err)
}

#[pyfunction]
fn exponent(graph_json: &str) -> PyResult<i64> {
    let g = parse_graph(graph_json).map_err(value_err)?.into_graph().map_err(value_err)?;
    amplitude_exponent(&g).map_err(value_err)
}

/// Knot report as a JSON string.
#[pyfunction]
#[pyo3(signature = (pd, mode = "simplified"))]
fn knot(pd: &str, mode: &str) -> PyResult<String> {
    let mode: KnotMode = mode.parse().map_err(value_err)?;
    let diagram = parse_pd(pd).map_err(value_err)?;
    let (_, report) = knot_report(&diagram, mode).map_err(value_err)?;
    serde_json::to_string(&report).map_err(value_err)
}

/// `(id, name, passed)` for each requested criterion.
#[pyfunction]
#[pyo3(signature = (suite = "all", seed = 0))]
fn verify(py: Python<'_>, suite: &str, seed: u64) -> PyResult<Vec<(usize, String, bool)>> {
    let ids = parse_suite(suite).map_err(to_py)?;
    let pool = thread_pool().map_err(to_py)?;
    let results = py.detach(|| pool.install(|| run_suite(&ids, seed)));
    Ok(results.into_iter().map(|r| (r.id, r.name.to_string(), r.passed)).collect())
}

#[pymodule]
fn tenscomb_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(fuss_catalan, m)?)?;
    m.add_function(wrap_pyfunction!(melonic_series, m)?)?;
    m.add_function(wrap_pyfunction!(degree, m)?)?;
    m.add_function(wrap_pyfunction!(exponent, m)?)?;
    m.add_function(wrap_pyfunction!(knot, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
