//! Python bindings for `pnilrep`.
//!
//! Labels and rationals cross the boundary as strings in the same syntax the
//! command line accepts (`"1/3"`, `"1,1,1/9"`); group elements are integer
//! coordinate lists reduced modulo the working precision.

use num_complex::Complex64;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use pnilrep::dual::{enumerate_dual_ball, peter_weyl_check, RepLabel, DEFAULT_CAP};
use pnilrep::group::{Coords, GroupId, GroupLaw, MAX_DIM};
use pnilrep::oscint::{gaussian_disk_integral, parse_rat};
use pnilrep::rep::Rep;

fn py_err(e: pnilrep::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn law_of(group: &str) -> PyResult<GroupLaw> {
    Ok(GroupLaw::new(group.parse::<GroupId>().map_err(py_err)?))
}

fn rep_of(group: &str, prime: u64, xi: &str) -> PyResult<Rep> {
    let label = RepLabel::parse(law_of(group)?, prime, xi).map_err(py_err)?;
    Rep::new(&label).map_err(py_err)
}

fn coords_of(rep: &Rep, x: &[i64]) -> PyResult<Coords> {
    if x.len() != rep.law().dim {
        return Err(PyValueError::new_err(format!("expected {} coordinates, got {}", rep.law().dim, x.len())));
    }
    let mut c = [0u64; MAX_DIM];
    for (i, v) in x.iter().enumerate() {
        c[i] = rep.md.reduce(*v as i128);
    }
    Ok(c)
}

/// Labels with `||xi|| <= p^level` as `(components, dimension)` pairs.
#[pyfunction]
fn dual(group: &str, prime: u64, level: u32) -> PyResult<Vec<(Vec<String>, u64)>> {
    let law = law_of(group)?;
    let labels = enumerate_dual_ball(&law, prime, level, DEFAULT_CAP).map_err(py_err)?;
    Ok(labels.iter().map(|l| (l.xi.strings(), l.dim)).collect())
}

/// `(sum of d^2, |G / G(p^level)|)` over the dual ball.
#[pyfunction]
fn peter_weyl(group: &str, prime: u64, level: u32) -> PyResult<(u128, u128)> {
    let r = peter_weyl_check(&law_of(group)?, prime, level, DEFAULT_CAP).map_err(py_err)?;
    Ok((r.sum_d_squared, r.expected))
}

/// The dense matrix `pi_xi(x)`, row-major.
#[pyfunction]
fn rep_matrix(group: &str, prime: u64, xi: &str, x: Vec<i64>) -> PyResult<Vec<Vec<Complex64>>> {
    let rep = rep_of(group, prime, xi)?;
    let m = rep.matrix(&coords_of(&rep, &x)?);
    Ok((0..rep.dim).map(|r| (0..rep.dim).map(|c| m[(r, c)]).collect()).collect())
}

/// `Tr pi_xi(x)`.
#[pyfunction]
fn character(group: &str, prime: u64, xi: &str, x: Vec<i64>) -> PyResult<Complex64> {
    let rep = rep_of(group, prime, xi)?;
    Ok(rep.trace(&coords_of(&rep, &x)?))
}

/// `int_{p^gamma Z_p} e(a u^2 + b u) du` in closed form.
#[pyfunction]
fn gaussian(prime: u64, a: &str, b: &str, gamma: i32) -> PyResult<Complex64> {
    let a = parse_rat(a).map_err(py_err)?;
    let b = parse_rat(b).map_err(py_err)?;
    gaussian_disk_integral(prime, &a, &b, gamma).map_err(py_err)
}

/// Run the command-line interface; returns `(exit code, stdout, stderr)`.
#[pyfunction]
fn run(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    let argv = std::iter::once("pnilrep".to_string()).chain(args);
    let out = py.detach(|| pnilrep::cli::run(argv));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
#[pyo3(name = "pnilrep")]
fn pnilrep_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_function(wrap_pyfunction!(dual, m)?)?;
    m.add_function(wrap_pyfunction!(peter_weyl, m)?)?;
    m.add_function(wrap_pyfunction!(rep_matrix, m)?)?;
    m.add_function(wrap_pyfunction!(character, m)?)?;
    m.add_function(wrap_pyfunction!(gaussian, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
