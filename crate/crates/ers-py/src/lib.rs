//! Python bindings: Boehm-backend search, optimisation and regression.
//!
//! Codes cross the boundary as `(k, p)` tuples of Python ints.

use ers::boehm::TernaryCode;
use ers::expr::{compile_boehm, parse_comparison, parse_expr};
use ers::optimisation::{global_max, global_min, Algo};
use ers::regression::{regress_opt, regress_search, Regression};
use ers::search::{boehm_comparison, search_branching, search_tb_exhaustive};
use ers::ErsError;
use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

type Code = (BigInt, i64);

fn to_py(e: ErsError) -> PyErr {
    match e {
        ErsError::Contract(_) | ErsError::NotBelow { .. } => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn anchor(s: &str) -> PyResult<TernaryCode> {
    s.parse().map_err(to_py)
}

fn pair(c: &TernaryCode) -> Code {
    (c.k.clone(), c.p)
}

fn opt_algo(s: &str) -> PyResult<Algo> {
    match s {
        "exhaustive" => Ok(Algo::Exhaustive),
        "bnb" => Ok(Algo::Bnb),
        _ => Err(PyValueError::new_err(format!("unknown algorithm {s:?}"))),
    }
}

/// First code in the anchor satisfying `pred` at precision `eps`, or `None`.
#[pyfunction]
#[pyo3(signature = (pred, eps, interval = "-1@0", algo = "exhaustive", var = "x"))]
fn search(pred: &str, eps: i64, interval: &str, algo: &str, var: &str) -> PyResult<Option<Code>> {
    let a = anchor(interval)?;
    let cmp = parse_comparison(pred).map_err(to_py)?;
    let p = boehm_comparison(&cmp, var, &a, eps).map_err(to_py)?;
    let r = match algo {
        "exhaustive" => search_tb_exhaustive(&a, &p),
        "branch" => search_branching(&a, &p),
        _ => return Err(PyValueError::new_err(format!("unknown algorithm {algo:?}"))),
    }
    .map_err(to_py)?;
    Ok(r.code.as_ref().map(pair))
}

/// `(argument code, value code)` of an approximate global minimum or maximum.
#[pyfunction]
#[pyo3(signature = (function, eps, interval = "-1@0", algo = "exhaustive", maximise = false, var = "x"))]
fn optimise(
    function: &str,
    eps: i64,
    interval: &str,
    algo: &str,
    maximise: bool,
    var: &str,
) -> PyResult<(Code, Code)> {
    let a = anchor(interval)?;
    let f = compile_boehm(&parse_expr(function).map_err(to_py)?, &[var]).map_err(to_py)?;
    let run = if maximise { global_max } else { global_min };
    let r = run(&f, &a, eps, opt_algo(algo)?).map_err(to_py)?;
    Ok((pair(&r.arg_code), pair(&r.value_code)))
}

/// Best single parameter of `model` against `oracle` at the observations.
///
/// `fit` is `"opt"` (minimise the loss) or `"search"` (first parameter whose
/// loss is within one code of zero; `None` when there is none).
#[pyfunction]
#[pyo3(signature = (model, oracle, eps, observations = vec!["-1".to_string(), "0".to_string(), "1".to_string()], interval = "-1@0", fit = "opt", algo = "exhaustive", param = "p", predictor = "x"))]
#[allow(clippy::too_many_arguments)]
fn regress(
    model: &str,
    oracle: &str,
    eps: i64,
    observations: Vec<String>,
    interval: &str,
    fit: &str,
    algo: &str,
    param: &str,
    predictor: &str,
) -> PyResult<Option<Code>> {
    let a = anchor(interval)?;
    let obs = observations
        .iter()
        .map(|s| parse_expr(s))
        .collect::<Result<Vec<_>, _>>()
        .map_err(to_py)?;
    let m = parse_expr(model).map_err(to_py)?;
    let o = parse_expr(oracle).map_err(to_py)?;
    let r = Regression::new(m, o, &[param], predictor, obs).map_err(to_py)?;
    match fit {
        "opt" => Ok(Some(pair(
            &regress_opt(&r, &a, eps, opt_algo(algo)?)
                .map_err(to_py)?
                .arg_code,
        ))),
        "search" => Ok(regress_search(&r, &a, eps)
            .map_err(to_py)?
            .code
            .as_ref()
            .map(pair)),
        _ => Err(PyValueError::new_err(format!("unknown fit {fit:?}"))),
    }
}

/// Runs the `ers` command line with `args` (without the program name).
#[pyfunction]
fn run_cli(args: Vec<String>) -> i32 {
    ers::cli::main_with_args(std::iter::once("ers".to_string()).chain(args))
}

#[pymodule]
fn ers_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(optimise, m)?)?;
    m.add_function(wrap_pyfunction!(regress, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
