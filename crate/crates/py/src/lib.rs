//! Python bindings for `filiform-core`.

use filiform_core::dataset::ErrataMode;
use filiform_core::deformation::{check_deformation, counterexample_spec, verify_table};
use filiform_core::invariants::{invariant_report, Sampling};
use filiform_core::scalar::{fmt_rational, parse_rational, Rational};
use filiform_core::{cli, corpus, expr};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn rational(text: &str) -> PyResult<Rational> {
    parse_rational(text).ok_or_else(|| err(format!("not a rational number: {text:?}")))
}

fn errata(mode: &str) -> PyResult<ErrataMode> {
    match mode {
        "verbatim" => Ok(ErrataMode::Verbatim),
        "corrected" => Ok(ErrataMode::Corrected),
        _ => Err(err(format!("errata mode must be 'verbatim' or 'corrected', got {mode:?}"))),
    }
}

/// Laurent polynomial in `t` with polynomial dependence on `alpha`, over Q.
#[pyclass(name = "Scalar", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
struct PyScalar(filiform_core::scalar::Scalar);

#[pymethods]
impl PyScalar {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        expr::parse_scalar(text).map(Self).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Scalar('{}')", self.0)
    }

    fn __add__(&self, other: &Self) -> Self {
        Self(&self.0 + &other.0)
    }

    fn __sub__(&self, other: &Self) -> Self {
        Self(&self.0 - &other.0)
    }

    fn __mul__(&self, other: &Self) -> Self {
        Self(&self.0 * &other.0)
    }

    fn __neg__(&self) -> Self {
        Self(-&self.0)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// Value at rational `t` and `alpha`, as a string such as `"-7/2"`.
    #[pyo3(signature = (t, alpha = "0"))]
    fn specialize(&self, t: &str, alpha: &str) -> PyResult<String> {
        let v = self.0.specialize(&rational(t)?, &rational(alpha)?).map_err(err)?;
        Ok(fmt_rational(&v))
    }

    fn unit_inverse(&self) -> PyResult<Self> {
        self.0.unit_inverse().map(Self).map_err(err)
    }
}

/// Names of the ten tables carrying a degeneration certificate.
#[pyfunction]
fn tables() -> Vec<&'static str> {
    corpus::TABLES.to_vec()
}

/// Verification stages of one table as `(stage, passed, detail)` triples.
#[pyfunction]
#[pyo3(signature = (name, errata_mode = "verbatim"))]
fn verify(name: &str, errata_mode: &str) -> PyResult<Vec<(String, bool, String)>> {
    let a = corpus::load(name, errata(errata_mode)?).map_err(err)?;
    let r = verify_table(&a).map_err(err)?;
    Ok(r.stages
        .into_iter()
        .map(|s| (s.stage.to_string(), s.passed, s.detail))
        .collect())
}

/// Violated invariant expectations at the default sample points.
#[pyfunction]
#[pyo3(signature = (name, errata_mode = "corrected"))]
fn invariant_violations(name: &str, errata_mode: &str) -> PyResult<Vec<String>> {
    let a = corpus::load(name, errata(errata_mode)?).map_err(err)?;
    let r = invariant_report(&a, &Sampling::default()).map_err(err)?;
    Ok(r.violations())
}

/// Whether the weight-zero counterexample is a valid deformation.
#[pyfunction]
fn counterexample_valid() -> PyResult<bool> {
    let a = corpus::load(cli::COUNTEREXAMPLE_ALGEBRA, ErrataMode::Verbatim).map_err(err)?;
    let v = check_deformation(&counterexample_spec(&a).map_err(err)?).map_err(err)?;
    Ok(v.valid())
}

/// Runs the command line tool in-process; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run(args: Vec<String>) -> (i32, String, String) {
    let out = cli::run_from(std::iter::once("filiform".to_string()).chain(args));
    (out.code, out.stdout, out.stderr)
}

#[pymodule]
fn filiform(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScalar>()?;
    m.add_function(wrap_pyfunction!(tables, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    m.add_function(wrap_pyfunction!(invariant_violations, m)?)?;
    m.add_function(wrap_pyfunction!(counterexample_valid, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
