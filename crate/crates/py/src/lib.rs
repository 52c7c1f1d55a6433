//! Python module `pgx`.

use std::time::{Duration, Instant};

use pyo3::exceptions::{PyTimeoutError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use pgx_core::catalog::{residue_params as residues, Catalog};
use pgx_core::functors;
use pgx_core::nu::analyze as analyze_group;
use pgx_core::pc::{check_consistency, parse_pc_presentation_with, PcPresentation, Symbols};
use pgx_core::pquotient::QuotientOptions;
use pgx_core::special_be::{be_multiplier as be_mult, be_setup};
use pgx_core::verify::{describe_group, plan, run_unit, Scope, Status};
use pgx_core::Error;

fn err(e: Error) -> PyErr {
    match e {
        Error::Timeout => PyTimeoutError::new_err("deadline exceeded"),
        e => PyValueError::new_err(e.to_string()),
    }
}

fn catalog() -> PyResult<Catalog> {
    Catalog::load().map_err(err)
}

/// A catalog name, X / Y, `SmallGroup(order,id)`, or presentation text.
fn group(cat: &Catalog, spec: &str, p: u32) -> PyResult<PcPresentation> {
    if spec.contains("generators:") {
        let mut sym = Symbols::new();
        sym.insert("p".into(), p as i64);
        let g = parse_pc_presentation_with(spec, &sym).map_err(err)?;
        if !check_consistency(&g).is_empty() {
            return Err(PyValueError::new_err("presentation is inconsistent"));
        }
        return Ok(g);
    }
    if let Some(body) = spec.strip_prefix("SmallGroup(").and_then(|s| s.strip_suffix(')')) {
        let parsed = body
            .split_once(',')
            .and_then(|(o, i)| Some((o.trim().parse().ok()?, i.trim().parse().ok()?)));
        let (o, id) = parsed.ok_or_else(|| PyValueError::new_err("expected SmallGroup(order,id)"))?;
        return cat.fixture_group(o, id).map_err(err);
    }
    cat.named_group(spec, p).map_err(err)
}

/// `(nu, zeta)`: smallest quadratic non-residue and smallest primitive root mod p.
#[pyfunction]
fn residue_params(p: u32) -> PyResult<(u32, u32)> {
    let r = residues(p).map_err(err)?;
    Ok((r.nu, r.zeta))
}

/// Names of the catalog groups of order p^n.
#[pyfunction]
fn catalog_names(order_exponent: u32, p: u32) -> PyResult<Vec<String>> {
    Ok(catalog()?.list(order_exponent, p).map_err(err)?.into_iter().map(|e| e.name).collect())
}

/// The pc presentation of a group, as text.
#[pyfunction]
fn presentation(spec: &str, p: u32) -> PyResult<String> {
    Ok(group(&catalog()?, spec, p)?.to_text())
}

/// Invariants of one group as a dict.
#[pyfunction]
#[pyo3(signature = (spec, p, timeout = 120.0))]
fn analyze<'py>(py: Python<'py>, spec: &str, p: u32, timeout: f64) -> PyResult<Bound<'py, PyDict>> {
    let cat = catalog()?;
    let g = group(&cat, spec, p)?;
    let opts = QuotientOptions {
        deadline: Some(Instant::now() + Duration::from_secs_f64(timeout)),
        ..QuotientOptions::default()
    };
    let (_, a) = analyze_group(&g, p, &opts).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("order_exponent", g.order_exponent())?;
    d.set_item("class", a.class)?;
    d.set_item("abelianization", a.abelianization.divisors().to_vec())?;
    d.set_item("gamma", functors::gamma_whitehead(&a.abelianization).divisors().to_vec())?;
    d.set_item("multiplier", a.multiplier.divisors().to_vec())?;
    d.set_item("exterior_square", describe_group(&cat, &a.wedge, p))?;
    d.set_item("exterior_square_order", a.wedge.fingerprint.order.clone())?;
    d.set_item("tensor_square", describe_group(&cat, &a.tensor, p))?;
    d.set_item("tensor_square_order", a.tensor.fingerprint.order.clone())?;
    d.set_item("capable", a.capable())?;
    d.set_item("epicenter_order", a.epicenter.order())?;
    d.set_item("nu_order_exponent", a.nu_order_exponent)?;
    d.set_item("nu_class", a.nu_class)?;
    Ok(d)
}

/// Whitehead's Gamma of an abelian group given by its invariants.
#[pyfunction]
fn gamma(invariants: Vec<u64>) -> Vec<u64> {
    functors::gamma_whitehead(&pgx_core::AbelianInvariants::from_orders(invariants)).divisors().to_vec()
}

#[pyfunction]
fn abelian_tensor(a: Vec<u64>, b: Vec<u64>) -> Vec<u64> {
    use pgx_core::AbelianInvariants as A;
    functors::abelian_tensor(&A::from_orders(a), &A::from_orders(b)).divisors().to_vec()
}

/// Multiplier of a class-2 group with elementary abelian G/G' and G', by linear algebra.
#[pyfunction]
fn be_multiplier(spec: &str, p: u32) -> PyResult<Vec<u64>> {
    let g = group(&catalog()?, spec, p)?;
    let ctx = be_setup(&g, p).map_err(err)?;
    Ok(be_mult(&ctx).divisors().to_vec())
}

/// `(passed, failed, errors)` for one verification scope.
#[pyfunction]
#[pyo3(signature = (scope, primes = vec![5]))]
fn verify(scope: &str, primes: Vec<u32>) -> PyResult<(usize, usize, usize)> {
    let cat = catalog()?;
    let scope: Scope = scope.parse().map_err(err)?;
    let units = plan(&cat, scope, &primes).map_err(err)?;
    let mut counts = (0, 0, 0);
    for u in &units {
        match run_unit(&cat, u, &QuotientOptions::default()).status {
            Status::Pass => counts.0 += 1,
            Status::Fail => counts.1 += 1,
            Status::Error => counts.2 += 1,
        }
    }
    Ok(counts)
}

#[pymodule]
pub fn pgx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(residue_params, m)?)?;
    m.add_function(wrap_pyfunction!(catalog_names, m)?)?;
    m.add_function(wrap_pyfunction!(presentation, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(gamma, m)?)?;
    m.add_function(wrap_pyfunction!(abelian_tensor, m)?)?;
    m.add_function(wrap_pyfunction!(be_multiplier, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add("SCHEMA", 1)?;
    Ok(())
}
