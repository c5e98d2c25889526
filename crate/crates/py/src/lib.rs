//! Python bindings. Reports cross the boundary as JSON strings.

use dihedral_g2::cli::{self, scenario::Scenario, Command};
use dihedral_g2::padic::PAdicField;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: dihedral_g2::Error) -> PyErr {
    if e.is_internal() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn command(name: &str) -> PyResult<Command> {
    Ok(match name {
        "classify" => Command::Classify,
        "epsilon" => Command::Epsilon,
        "dichotomy" => Command::Dichotomy,
        "packet" => Command::Packet,
        "satake" => Command::Satake,
        other => return Err(PyValueError::new_err(format!("unknown scenario command `{other}`"))),
    })
}

fn report(cmd: &Command, sc: Option<&Scenario>) -> PyResult<String> {
    let resolved = sc.map(|s| s.resolve()).transpose().map_err(to_py)?;
    let out = cli::run(cmd, resolved.as_ref());
    match out.error {
        Some(e) => Err(to_py(e)),
        None => Ok(out.report.expect("report on success")),
    }
}

/// Run `command` on a scenario given as JSON text; returns the JSON report.
#[pyfunction]
fn run_scenario(command_name: &str, scenario_json: &str) -> PyResult<String> {
    let sc = Scenario::from_json(scenario_json).map_err(to_py)?;
    report(&command(command_name)?, Some(&sc))
}

/// Run `command` on a named built-in fixture.
#[pyfunction]
fn run_fixture(command_name: &str, name: &str) -> PyResult<String> {
    let sc = cli::fixtures::find(name).map_err(to_py)?;
    report(&command(command_name)?, Some(&sc))
}

#[pyfunction]
fn fixture_names() -> PyResult<Vec<String>> {
    Ok(cli::fixtures::catalog().map_err(to_py)?.into_iter().map(|(n, _)| n).collect())
}

#[pyfunction]
#[pyo3(signature = (expr=None))]
fn rewrite(expr: Option<String>) -> PyResult<String> {
    report(&Command::Rewrite { expr }, None)
}

#[pyfunction]
#[pyo3(signature = (p, coeffs, lambdas=vec![], extension="unramified".to_string()))]
fn cubic(p: u64, coeffs: [String; 4], lambdas: Vec<String>, extension: String) -> PyResult<String> {
    report(&Command::Cubic { p, extension, coeffs, lambdas }, None)
}

/// Hilbert symbol (a, b) over Q_p for rationals given as strings.
#[pyfunction]
fn hilbert_symbol(p: u64, a: &str, b: &str) -> PyResult<i8> {
    let f = PAdicField::with_default_precision(p).map_err(to_py)?;
    let parse = |s: &str| -> PyResult<_> {
        let r: num_rational::BigRational = s.parse().map_err(|_| PyValueError::new_err(format!("bad rational `{s}`")))?;
        Ok(f.from_big_rational(r))
    };
    dihedral_g2::padic::hilbert_symbol(&parse(a)?, &parse(b)?).map_err(to_py)
}

/// Run the property suites; returns the JSON summary. Raises if any suite fails.
#[pyfunction]
#[pyo3(signature = (suite=None))]
fn selftest(suite: Option<u8>) -> PyResult<String> {
    report(&Command::Selftest { suite }, None)
}

#[pymodule]
fn dihedral_g2_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", cli::VERSION)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    m.add_function(wrap_pyfunction!(run_fixture, m)?)?;
    m.add_function(wrap_pyfunction!(fixture_names, m)?)?;
    m.add_function(wrap_pyfunction!(rewrite, m)?)?;
    m.add_function(wrap_pyfunction!(cubic, m)?)?;
    m.add_function(wrap_pyfunction!(hilbert_symbol, m)?)?;
    m.add_function(wrap_pyfunction!(selftest, m)?)?;
    Ok(())
}
