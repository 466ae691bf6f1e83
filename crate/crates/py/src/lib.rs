use std::collections::BTreeMap;
use std::path::PathBuf;

use folpi::graph::classify_components;
use folpi::presentation::{abelianize, assemble_global};
use folpi::report::{run, Command, RunConfig};
use folpi::resolution::{parse_curve, resolve_with, ResolveOptions};
use folpi::saddle::{self, SaddleModel};
use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Resolve a germ; returns the dual graph text and the divisor multiplicities.
#[pyfunction]
#[pyo3(signature = (poly, max_blowups = 64))]
fn resolve(poly: &str, max_blowups: usize) -> PyResult<(String, BTreeMap<usize, u64>)> {
    let germ = parse_curve(poly).map_err(value_error)?;
    let t = resolve_with(&germ, ResolveOptions { max_blowups }).map_err(value_error)?;
    Ok((t.graph.to_text(), t.mult))
}

/// Abelianization of the leaf fundamental group, e.g. `"Z^2"`.
#[pyfunction]
fn abelianization(poly: &str) -> PyResult<String> {
    let germ = parse_curve(poly).map_err(value_error)?;
    let t = resolve_with(&germ, ResolveOptions::default()).map_err(value_error)?;
    let g = t.graph.clone().with_mult(t.mult.clone()).map_err(value_error)?;
    let dec = classify_components(&g).map_err(value_error)?;
    let pres = assemble_global(&g, &dec, g.mult().expect("multiplicities attached")).map_err(value_error)?;
    Ok(abelianize(&pres.presentation).to_string())
}

#[pyfunction]
fn holonomy(model: &str, y0: Complex64) -> PyResult<Complex64> {
    let m = SaddleModel::parse(model).map_err(value_error)?;
    saddle::holonomy(&m, y0).map_err(value_error)
}

/// Dulac image of `r·e^{iθ}` in the slice `arg y = θ_j`.
#[pyfunction]
#[pyo3(signature = (model, r, theta, theta_j = 0.0))]
fn dulac(model: &str, r: f64, theta: f64, theta_j: f64) -> PyResult<Complex64> {
    let m = SaddleModel::parse(model).map_err(value_error)?;
    saddle::dulac_map(&m, r, theta, theta_j).map(|d| d.x).map_err(value_error)
}

/// Full CLI report for `command` in resolve, pi1, decompose, saddle-verify, rabotage-sweep.
/// Returns the exit code and the report text.
#[pyfunction]
#[pyo3(signature = (command, arg, seed = 0, samples = 4096))]
fn report(command: &str, arg: &str, seed: u64, samples: usize) -> PyResult<(i32, String)> {
    let arg = arg.to_string();
    let command = match command {
        "resolve" => Command::Resolve { poly: arg },
        "pi1" => Command::Pi1 { input: arg },
        "decompose" => Command::Decompose { graph_file: PathBuf::from(arg) },
        "saddle-verify" => Command::SaddleVerify { model: arg },
        "rabotage-sweep" => Command::RabotageSweep { model: arg },
        other => return Err(PyValueError::new_err(format!("unknown command '{other}'"))),
    };
    let mut config = RunConfig::new(command);
    config.seed = seed;
    config.samples = samples;
    let out = run(&config);
    Ok((out.code, out.report))
}

#[pymodule]
fn _native(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(resolve, m)?)?;
    m.add_function(wrap_pyfunction!(abelianization, m)?)?;
    m.add_function(wrap_pyfunction!(holonomy, m)?)?;
    m.add_function(wrap_pyfunction!(dulac, m)?)?;
    m.add_function(wrap_pyfunction!(report, m)?)?;
    Ok(())
}
