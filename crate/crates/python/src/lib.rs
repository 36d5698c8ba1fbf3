//! Python bindings. Structured results come back as plain dicts and lists.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use serde_json::json;

use fourfold::catalog::Catalog;
use fourfold::expr::{FamilyExpression, SumExpression};
use fourfold::geography::{self, ScanOptions, TheoremTag, WitnessOutcome};
use fourfold::monopole::{family_certificate, monopole_set_of};
use fourfold::obstruction::{assess, hitchin_thorpe, hitchin_thorpe_margin};
use fourfold::reproduce::run_reproduce;
use fourfold::{ManifoldSpec, UnimodularForm};

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn catalog() -> PyResult<Catalog> {
    Catalog::from_env().map_err(err)
}

fn to_py<'py>(py: Python<'py>, v: &serde_json::Value) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (v.to_string(),))
}

#[pyclass(name = "Form", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyForm(UnimodularForm);

#[pymethods]
impl PyForm {
    /// Parses text like `-2E8 + 3H + 1<-1>`.
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyForm).map_err(err)
    }

    #[getter]
    fn rank(&self) -> u64 {
        self.0.rank()
    }

    #[getter]
    fn signature(&self) -> i64 {
        self.0.signature()
    }

    #[getter]
    fn even(&self) -> bool {
        self.0.is_even()
    }

    fn direct_sum(&self, other: &PyForm) -> PyForm {
        PyForm(self.0.direct_sum(&other.0))
    }

    fn is_isomorphic(&self, other: &PyForm) -> PyResult<bool> {
        self.0.is_isomorphic(&other.0).map_err(err)
    }

    fn classify<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let c = self.0.classify().map_err(err)?;
        to_py(py, &serde_json::to_value(c).map_err(err)?)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Form('{}')", self.0)
    }
}

#[pyclass(name = "Manifold", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyManifold(ManifoldSpec);

#[pymethods]
impl PyManifold {
    /// Evaluates a sum expression such as `X(2) # Y(0) # Y(5)`.
    #[new]
    fn new(expr: &str) -> PyResult<Self> {
        let e: SumExpression = expr.parse().map_err(err)?;
        e.evaluate(&catalog()?).map(PyManifold).map_err(err)
    }

    #[getter]
    fn label(&self) -> String {
        self.0.label().to_string()
    }

    #[getter]
    fn b_plus(&self) -> u64 {
        self.0.b_plus()
    }

    #[getter]
    fn b_minus(&self) -> u64 {
        self.0.b_minus()
    }

    #[getter]
    fn chi(&self) -> i64 {
        self.0.chi()
    }

    #[getter]
    fn tau(&self) -> i64 {
        self.0.tau()
    }

    #[getter]
    fn spin(&self) -> bool {
        self.0.spin()
    }

    #[getter]
    fn blowups(&self) -> u64 {
        self.0.blowups()
    }

    #[getter]
    fn form(&self) -> PyForm {
        PyForm(*self.0.form())
    }

    fn char_numbers<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(
            py,
            &serde_json::to_value(self.0.char_numbers()).map_err(err)?,
        )
    }

    fn connected_sum(&self, other: &PyManifold) -> PyManifold {
        PyManifold(self.0.connected_sum(&other.0))
    }

    fn blow_up(&self, k: u64) -> PyManifold {
        PyManifold(self.0.blow_up(k))
    }

    fn homeomorphic(&self, other: &PyManifold) -> PyResult<bool> {
        self.0.homeomorphic(&other.0).map_err(err)
    }

    /// "violated", "boundary" or "strictly-satisfied".
    fn hitchin_thorpe(&self) -> String {
        hitchin_thorpe(&self.0).to_string()
    }

    fn hitchin_thorpe_margin(&self) -> i64 {
        hitchin_thorpe_margin(&self.0)
    }

    fn check_einstein<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let a = assess(&self.0).map_err(err)?;
        let v = json!({
            "hitchin_thorpe": a.hitchin_thorpe.to_string(),
            "verdict": a.verdict.record(),
            "einstein_known": a.einstein_known.map(|c| c.to_string()),
            "nonexistence": a.nonexistence(),
        });
        to_py(py, &v)
    }

    /// Certified bandwidth lower bound of the Bauer monopole set.
    fn bandwidth(&self) -> PyResult<u64> {
        Ok(monopole_set_of(&self.0)
            .map_err(err)?
            .bandwidth()
            .lower_bound)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Manifold('{}')", self.0.label())
    }
}

#[pyfunction]
fn family_bandwidth<'py>(
    py: Python<'py>,
    expr: &str,
    ells: Vec<i64>,
) -> PyResult<Bound<'py, PyAny>> {
    let family: FamilyExpression = expr.parse().map_err(err)?;
    let cert = family_certificate(&family, &ells, &catalog()?).map_err(err)?;
    to_py(py, &serde_json::to_value(cert).map_err(err)?)
}

#[pyfunction]
fn region_membership<'py>(py: Python<'py>, m: u64, n: u64) -> PyResult<Bound<'py, PyAny>> {
    to_py(
        py,
        &serde_json::to_value(geography::region_membership(m, n)).map_err(err)?,
    )
}

#[pyfunction]
#[pyo3(signature = (m, n, theorem, ell = 1))]
fn witness<'py>(
    py: Python<'py>,
    m: u64,
    n: u64,
    theorem: &str,
    ell: i64,
) -> PyResult<Bound<'py, PyAny>> {
    let tag: TheoremTag = theorem.parse().map_err(err)?;
    let w = geography::witness(m, n, tag, ell, &catalog()?).map_err(err)?;
    let (certified, gap) = match &w.outcome {
        WitnessOutcome::Certified => (true, None),
        WitnessOutcome::Gap(g) => (false, Some(g.to_string())),
    };
    let checks = w.checks.as_ref();
    let v = json!({
        "theorem": tag.to_string(),
        "m": m,
        "n": n,
        "ell": ell,
        "expression": w.expression.as_ref().map(|e| e.to_string()),
        "certified": certified,
        "gap": gap,
        "homeomorphic": checks.map(|c| c.homeomorphic),
        "verdict": checks.map(|c| c.verdict.record()),
        "bandwidth_lower_bound": checks.and_then(|c| c.bandwidth_lower_bound),
    });
    to_py(py, &v)
}

#[pyfunction]
fn spin_family<'py>(py: Python<'py>, n: i64, ell: i64) -> PyResult<Bound<'py, PyAny>> {
    let r = geography::spin_family(n, ell, &catalog()?).map_err(err)?;
    let v = json!({
        "n": r.n,
        "ell": r.ell,
        "manifold": r.manifold.label(),
        "chi": r.chi,
        "tau": r.tau,
        "hitchin_thorpe": r.hitchin_thorpe.to_string(),
        "ht_margin": r.ht_margin,
        "homeomorphic_to_target": r.homeomorphic_to_target,
        "verdict": r.verdict.record(),
        "bandwidth_lower_bound": r.bandwidth_lower_bound,
        "certified": r.certified(),
    });
    to_py(py, &v)
}

#[pyfunction]
#[pyo3(signature = (m_min, m_max, n_min, n_max, certify = false, ell = 1))]
fn scan<'py>(
    py: Python<'py>,
    m_min: u64,
    m_max: u64,
    n_min: u64,
    n_max: u64,
    certify: bool,
    ell: i64,
) -> PyResult<Bound<'py, PyAny>> {
    let cat = catalog()?;
    let reports = py.detach(|| {
        geography::scan(
            m_min..=m_max,
            n_min..=n_max,
            ScanOptions { certify, ell },
            &cat,
        )
    });
    to_py(py, &serde_json::to_value(reports).map_err(err)?)
}

/// (all checks pass, rows)
#[pyfunction]
#[pyo3(signature = (filter = None))]
fn reproduce<'py>(py: Python<'py>, filter: Option<&str>) -> PyResult<(bool, Bound<'py, PyAny>)> {
    let report = run_reproduce(&catalog()?, filter).map_err(err)?;
    let rows = to_py(py, &serde_json::to_value(&report.rows).map_err(err)?)?;
    Ok((report.all_pass(), rows))
}

#[pymodule]
fn pyfourfold(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyForm>()?;
    m.add_class::<PyManifold>()?;
    m.add_function(wrap_pyfunction!(family_bandwidth, m)?)?;
    m.add_function(wrap_pyfunction!(region_membership, m)?)?;
    m.add_function(wrap_pyfunction!(witness, m)?)?;
    m.add_function(wrap_pyfunction!(spin_family, m)?)?;
    m.add_function(wrap_pyfunction!(scan, m)?)?;
    m.add_function(wrap_pyfunction!(reproduce, m)?)?;
    Ok(())
}
