//! Python bindings. Rationals cross the boundary as `"p/q"` strings and
//! reports as JSON text.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use tpa_core::classify::DEFAULT_SEED;
use tpa_core::reproduce::{self, ReproduceConfig};
use tpa_core::{json as tj, rational, CatalogEntry, DerivationSpace, DerivationWeight, LieAlgebra, TpChecker};

fn err(e: tpa_core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn build(algebra: &str, n: usize) -> PyResult<LieAlgebra> {
    match algebra {
        "tn" => LieAlgebra::upper_triangular(n),
        "mn" => LieAlgebra::full_matrix(n),
        "sln" => LieAlgebra::special_linear(n),
        other => return Err(PyValueError::new_err(format!("unknown algebra {other:?}; use tn, mn or sln"))),
    }
    .map_err(err)
}

fn space(algebra: &str, n: usize, weight: &str) -> PyResult<DerivationSpace> {
    let w = DerivationWeight(rational::parse(weight).map_err(err)?);
    Ok(DerivationSpace::compute(&build(algebra, n)?, &w))
}

/// Canonical `"p/q"` form of a rational.
#[pyfunction]
fn normalize_rational(s: &str) -> PyResult<String> {
    rational::parse(s).map(|r| rational::format(&r)).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (algebra, n, weight = "1/2"))]
fn derivation_dimension(algebra: &str, n: usize, weight: &str) -> PyResult<usize> {
    Ok(space(algebra, n, weight)?.dim())
}

/// Basis maps as lists of columns of rational strings.
#[pyfunction]
#[pyo3(signature = (algebra, n, weight = "1/2"))]
fn derivation_basis(algebra: &str, n: usize, weight: &str) -> PyResult<Vec<Vec<Vec<String>>>> {
    Ok(space(algebra, n, weight)?.basis().iter().map(|m| tj::linear_map_to_json(m).columns).collect())
}

/// Product JSON for a catalog entry (`t2:<name>`, `tn_form2`, `mn_trace`).
#[pyfunction]
#[pyo3(signature = (name, n = None, c = None))]
fn catalog_product(name: &str, n: Option<usize>, c: Option<&str>) -> PyResult<String> {
    let c = c.map(rational::parse).transpose().map_err(err)?;
    let p = CatalogEntry::parse(name, n, c).and_then(|e| e.build()).map_err(err)?;
    Ok(tj::to_pretty(&tj::product_to_json(&p)))
}

/// Structure report JSON for a product given as JSON text.
#[pyfunction]
fn verify(algebra: &str, n: usize, product_json: &str) -> PyResult<String> {
    let l = build(algebra, n)?;
    let p = tj::parse_product(product_json).map_err(err)?;
    let report = TpChecker::new(&l).report(&p).map_err(err)?;
    Ok(tj::to_pretty(&report))
}

/// Classification report JSON from seeded sampling on `T_n` or `M_n`.
#[pyfunction]
#[pyo3(signature = (algebra, n, seed = DEFAULT_SEED, count = 100))]
fn search(algebra: &str, n: usize, seed: u64, count: usize) -> PyResult<String> {
    let l = build(algebra, n)?;
    Ok(tj::to_pretty(&tpa_core::classify::classify(&l, seed, count).map_err(err)?))
}

/// Criterion reports JSON for the whole check suite.
#[pyfunction]
#[pyo3(signature = (n_max = reproduce::DEFAULT_N_MAX, seed = DEFAULT_SEED))]
fn run_checks(py: Python<'_>, n_max: usize, seed: u64) -> PyResult<String> {
    let cfg = ReproduceConfig::new(n_max, seed).map_err(err)?;
    let reports = py.detach(|| reproduce::run_all(&cfg)).map_err(err)?;
    Ok(tj::to_pretty(&reports))
}

#[pymodule]
fn tpa(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add("DEFAULT_SEED", DEFAULT_SEED)?;
    m.add_function(wrap_pyfunction!(normalize_rational, m)?)?;
    m.add_function(wrap_pyfunction!(derivation_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(derivation_basis, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_product, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(run_checks, m)?)?;
    Ok(())
}
