//! Python module `decomp_lab_py`. Maps, symbols and reports cross the boundary as JSON strings.

use decomp_lab::error::Error;
use decomp_lab::group::GroupFile;
use decomp_lab::lab::{dec_norm_experiment, run_suite, LabConfig, MapInput, Suite};
use decomp_lab::linalg::{schatten_norm as schatten, ComplexMatrix, Exponent};
use decomp_lab::pnorm;
use decomp_lab::sdp::{cb_norm_inf, SdpOptions};
use decomp_lab::superop::SuperOperator;
use decomp_lab::C64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Solver { .. } | Error::NoConvergence(_) | Error::Infeasible => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn exponent(p: &str) -> Result<Exponent, Error> {
    p.parse()
}

fn parse_map(json: &str) -> Result<SuperOperator, Error> {
    Ok(serde_json::from_str(json)?)
}

pub fn matrix(re: &[Vec<f64>], im: Option<&[Vec<f64>]>) -> Result<ComplexMatrix, Error> {
    let rows = re.len();
    let cols = re.first().map_or(0, Vec::len);
    let ragged = |m: &[Vec<f64>]| m.len() != rows || m.iter().any(|r| r.len() != cols);
    if rows == 0 || cols == 0 || ragged(re) || im.is_some_and(ragged) {
        return Err(Error::DimensionMismatch("ragged or empty matrix".into()));
    }
    Ok(ComplexMatrix::from_fn(rows, cols, |i, j| C64::new(re[i][j], im.map_or(0.0, |m| m[i][j]))))
}

fn to_json<T: serde::Serialize>(v: &T) -> Result<String, Error> {
    Ok(serde_json::to_string(v)?)
}

fn config(seed: u64, restarts: usize, trials: Option<usize>, quick: bool) -> LabConfig {
    LabConfig { seed, restarts, trials, quick, ..LabConfig::default() }
}

/// Schatten p norm of `re + i·im` (`p` is a number or "inf").
#[pyfunction]
#[pyo3(signature = (re, im=None, p="inf"))]
fn schatten_norm(re: Vec<Vec<f64>>, im: Option<Vec<Vec<f64>>>, p: &str) -> PyResult<f64> {
    let m = matrix(&re, im.as_deref()).map_err(py_err)?;
    schatten(&m, exponent(p).map_err(py_err)?).map_err(py_err)
}

#[pyfunction]
fn identity_map(n: usize) -> PyResult<String> {
    to_json(&SuperOperator::identity(n)).map_err(py_err)
}

#[pyfunction]
fn transpose_map(n: usize) -> PyResult<String> {
    to_json(&SuperOperator::transpose_map(n)).map_err(py_err)
}

/// Returns `(dec, cb, report_json)`; `map_json` is a map or a multiplier symbol.
#[pyfunction]
#[pyo3(signature = (map_json, p="inf", group_json=None, seed=0, restarts=64))]
fn dec_norm(map_json: &str, p: &str, group_json: Option<&str>, seed: u64, restarts: usize) -> PyResult<(f64, f64, String)> {
    let run = || -> Result<(f64, f64, String), Error> {
        let map: serde_json::Value = serde_json::from_str(map_json)?;
        let mut inputs = serde_json::json!({ "map": map });
        let algebra = match group_json {
            Some(g) => {
                let g: serde_json::Value = serde_json::from_str(g)?;
                inputs["group"] = g.clone();
                Some(serde_json::from_value::<GroupFile>(g)?.build()?)
            }
            None => None,
        };
        let input = MapInput::from_json(&map, algebra)?;
        let (report, _) = dec_norm_experiment(&input, exponent(p)?, &config(seed, restarts, None, false), &inputs)?;
        Ok((report.results["dec"], report.results["cb"], to_json(&report)?))
    };
    run().map_err(py_err)
}

/// Completely bounded norm at p = ∞ (certified lower bound).
#[pyfunction]
fn cb_norm(map_json: &str) -> PyResult<f64> {
    let t = parse_map(map_json).map_err(py_err)?;
    Ok(cb_norm_inf(&t, &SdpOptions::default()).map_err(py_err)?.value)
}

/// Lower estimate of the degree-d amplified p norm.
#[pyfunction]
#[pyo3(signature = (map_json, p, d=1, restarts=64, seed=0))]
fn pq_norm_lower(map_json: &str, p: &str, d: usize, restarts: usize, seed: u64) -> PyResult<f64> {
    let t = parse_map(map_json).map_err(py_err)?;
    let e = pnorm::pq_norm_lower(&t, exponent(p).map_err(py_err)?, d, restarts, seed).map_err(py_err)?;
    Ok(e.value)
}

/// Runs one battery; returns `(passed, report_json)`.
#[pyfunction]
#[pyo3(signature = (suite, seed=0, trials=None, quick=false, restarts=64))]
fn verify(suite: &str, seed: u64, trials: Option<usize>, quick: bool, restarts: usize) -> PyResult<(bool, String)> {
    let run = || -> Result<(bool, String), Error> {
        let suite: Suite = suite.parse()?;
        let report = run_suite(suite, &config(seed, restarts, trials, quick))?;
        Ok((report.passed, to_json(&report)?))
    };
    run().map_err(py_err)
}

#[pymodule]
fn decomp_lab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(schatten_norm, m)?)?;
    m.add_function(wrap_pyfunction!(identity_map, m)?)?;
    m.add_function(wrap_pyfunction!(transpose_map, m)?)?;
    m.add_function(wrap_pyfunction!(dec_norm, m)?)?;
    m.add_function(wrap_pyfunction!(cb_norm, m)?)?;
    m.add_function(wrap_pyfunction!(pq_norm_lower, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
