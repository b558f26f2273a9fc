//! Python bindings: growth tables, loop-space models, the bounds module and
//! the command line, with engine errors mapped to Python exceptions.

use algrowth::bounds::{affine_consistency, entropy_lower_bound, BoundSettings};
use algrowth::cli::{parse_json, parse_profile};
use algrowth::exactlin::parse_scalar;
use algrowth::fpcat::{classify_growth, word_growth, Presentation, SigmaSet};
use algrowth::loopmodels::{free_group_ball, graded_witt_dims, pbw_check, surface_group_ball, tensor_hilbert};
use algrowth::Error;
use num_bigint::BigUint;
use pyo3::exceptions::{PyMemoryError, PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

/// Parse and validation problems are the caller's fault; everything else is
/// reported as a runtime failure.
pub fn to_py(e: Error) -> PyErr {
    let msg = e.to_string();
    match e {
        Error::Parse { .. } | Error::Validation(_) | Error::Precondition(_) | Error::DimensionMismatch(_) => PyValueError::new_err(msg),
        Error::Unsupported(_) => PyNotImplementedError::new_err(msg),
        Error::Resource(_) => PyMemoryError::new_err(msg),
        Error::InvariantViolation(_) | Error::Internal(_) => PyRuntimeError::new_err(msg),
    }
}

/// Dimensions plus an optional `(verdict, rate)`.
type GrowthResult = (Vec<usize>, Option<(String, f64)>);

/// `dim W_Σ(n)` for n = 1..=n_max, with the classifier verdict and rate over
/// the given window.
#[pyfunction]
#[pyo3(signature = (presentation, sigma, n_max, window=None))]
fn growth(presentation: &str, sigma: &str, n_max: usize, window: Option<(usize, usize)>) -> PyResult<GrowthResult> {
    let p: Presentation = parse_json(presentation).map_err(to_py)?;
    let s: SigmaSet = parse_json(sigma).map_err(to_py)?;
    let table = word_growth(&p, &s, n_max).map_err(to_py)?;
    let verdict = match window {
        Some(w) => {
            let c = classify_growth(&table, w).map_err(to_py)?;
            Some((c.verdict.to_string(), c.rate_estimate))
        }
        None => None,
    };
    Ok((table.dims, verdict))
}

#[pyfunction]
#[pyo3(signature = (genus, n, orientable=true))]
fn surface_ball(genus: usize, n: usize, orientable: bool) -> PyResult<Vec<BigUint>> {
    Ok(surface_group_ball(genus, orientable, n).map_err(to_py)?.sizes)
}

#[pyfunction]
fn free_ball(rank: usize, n: usize) -> PyResult<Vec<BigUint>> {
    Ok(free_group_ball(rank, n).map_err(to_py)?.sizes)
}

#[pyfunction]
fn hilbert(degrees: Vec<u32>, n: usize) -> PyResult<Vec<BigUint>> {
    Ok(tensor_hilbert(&degrees, n).map_err(to_py)?.coefficients)
}

#[pyfunction]
fn witt(degrees: Vec<u32>, n: usize) -> PyResult<Vec<BigUint>> {
    Ok(graded_witt_dims(&degrees, n).map_err(to_py)?.lie_dims)
}

/// `None` when the PBW identity holds through order `n`, otherwise the first
/// order where it fails.
#[pyfunction]
fn pbw(degrees: Vec<u32>, n: usize) -> PyResult<Option<usize>> {
    pbw_check(&degrees, n).map_err(to_py)
}

/// Both bound reports for a profile TSV, as text.
#[pyfunction]
#[pyo3(signature = (profile, max_f="1", ambient_dim=2))]
fn bounds(profile: &str, max_f: &str, ambient_dim: u32) -> PyResult<(String, String)> {
    let p = parse_profile(profile).map_err(to_py)?;
    let max_f = parse_scalar(max_f).map_err(to_py)?;
    let s = BoundSettings::default();
    let a = affine_consistency(&p, ambient_dim, &s).map_err(to_py)?;
    let e = entropy_lower_bound(&p, &max_f, &s).map_err(to_py)?;
    Ok((a.to_text(), e.to_text()))
}

/// Runs the command line in process: `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let o = algrowth::cli::run(std::iter::once("algrowth".to_string()).chain(args));
    (o.code, o.stdout, o.stderr)
}

#[pymodule]
fn pyalgrowth(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(growth, m)?)?;
    m.add_function(wrap_pyfunction!(surface_ball, m)?)?;
    m.add_function(wrap_pyfunction!(free_ball, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert, m)?)?;
    m.add_function(wrap_pyfunction!(witt, m)?)?;
    m.add_function(wrap_pyfunction!(pbw, m)?)?;
    m.add_function(wrap_pyfunction!(bounds, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
