//! Python bindings for `afm_duality`.
//!
//! Results are returned as plain dicts and lists built from the same serde
//! representation the CLI prints as JSON.

use afm_duality::afm::{self, Flavor};
use afm_duality::duality::{self, FreeParams, RelationId};
use afm_duality::exact::{self, MassKind, MeshConfig, PredictMode, Symmetry, ThreeBodyBasisConfig};
use afm_duality::quantum_numbers::{q_custom, PrescriptionChoice, StateLabels};
use afm_duality::sweep::{run_sweep, SweepConfig};
use afm_duality::{studies, tables, Error};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

fn to_py(e: Error) -> PyErr {
    if e.is_solver_failure() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn to_object<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

/// A potential written in the `kind:param=value,...` grammar.
#[pyclass(name = "Potential", module = "pyafm", frozen, eq)]
#[derive(PartialEq)]
struct PyPotential(afm_duality::Potential);

#[pymethods]
impl PyPotential {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        text.parse().map(PyPotential).map_err(to_py)
    }

    fn __call__(&self, r: f64) -> PyResult<f64> {
        self.0.eval(r).map_err(to_py)
    }

    fn deriv(&self, r: f64) -> PyResult<f64> {
        self.0.deriv(r).map_err(to_py)
    }

    fn sqrt_transform(&self, alpha: f64) -> PyResult<Self> {
        self.0.sqrt_transform(alpha).map(PyPotential).map_err(to_py)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.0.kind().name()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Potential('{}')", self.0)
    }
}

/// An N-body system: kinematics, masses and potentials.
#[pyclass(name = "SystemSpec", module = "pyafm", frozen)]
struct PySystemSpec(afm::SystemSpec);

fn pot(p: Option<PyRef<'_, PyPotential>>) -> Option<afm_duality::Potential> {
    p.map(|p| p.0.clone())
}

#[pymethods]
impl PySystemSpec {
    /// `kinematics` is one of nr, ur, sr, sigma.
    #[new]
    #[pyo3(signature = (kinematics, n=2, m=None, one_body=None, two_body=None, sigma=None))]
    fn new(
        kinematics: &str,
        n: usize,
        m: Option<f64>,
        one_body: Option<PyRef<'_, PyPotential>>,
        two_body: Option<PyRef<'_, PyPotential>>,
        sigma: Option<f64>,
    ) -> PyResult<Self> {
        let (u, v) = (pot(one_body), pot(two_body));
        let need_m = || m.ok_or_else(|| PyValueError::new_err("m is required"));
        let spec = match kinematics {
            "nr" => afm::SystemSpec::nonrelativistic(n, need_m()?, u, v),
            "ur" => afm::SystemSpec::ultrarelativistic(n, u, v),
            "sr" => afm::SystemSpec::semirelativistic(n, need_m()?, u, v),
            "sigma" => {
                if u.is_some() {
                    return Err(PyValueError::new_err("the sigma system takes only two_body"));
                }
                let sigma = sigma.ok_or_else(|| PyValueError::new_err("sigma is required"))?;
                let v = v.ok_or_else(|| PyValueError::new_err("two_body is required"))?;
                afm::SystemSpec::sigma(sigma, m.unwrap_or(0.0), v)
            }
            other => return Err(PyValueError::new_err(format!("unknown kinematics `{other}` (nr, ur, sr, sigma)"))),
        };
        spec.map(PySystemSpec).map_err(to_py)
    }

    #[getter]
    fn kinematics(&self) -> &'static str {
        match self.0.flavor {
            Flavor::Nonrelativistic => "nr",
            Flavor::Ultrarelativistic => "ur",
            Flavor::GeneralSr => "sr",
            Flavor::SigmaSr => "sigma",
        }
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n
    }

    #[getter]
    fn m(&self) -> f64 {
        self.0.m
    }

    /// AFM solution at principal number `q` as a dict (`value`, `X0`, radii).
    fn solve<'py>(&self, py: Python<'py>, q: f64) -> PyResult<Bound<'py, PyAny>> {
        to_object(py, &afm::solve_afm(&self.0, q).map_err(to_py)?)
    }

    fn __repr__(&self) -> String {
        let show = |p: &Option<afm_duality::Potential>| p.as_ref().map_or("None".to_string(), |p| format!("'{p}'"));
        format!(
            "SystemSpec(kinematics='{}', n={}, m={}, one_body={}, two_body={})",
            self.kinematics(),
            self.0.n,
            self.0.m,
            show(&self.0.one_body),
            show(&self.0.two_body)
        )
    }
}

/// Principal quantum number of `labels` (`"n1,l1,n2,l2,..."`) under a preset
/// or custom prescription.
#[pyfunction]
#[pyo3(signature = (labels, prescription="ho"))]
fn principal_number(labels: &str, prescription: &str) -> PyResult<f64> {
    let labels: StateLabels = labels.parse().map_err(to_py)?;
    let p: PrescriptionChoice = prescription.parse().map_err(to_py)?;
    q_custom(&p.resolve(labels.len()).map_err(to_py)?, &labels).map_err(to_py)
}

/// F(x) for massless kinematics.
#[pyfunction]
fn universal_ur(p: PyRef<'_, PyPotential>, x: f64) -> PyResult<f64> {
    afm::universal_ur(&p.0, x).map_err(to_py)
}

/// G(x) for nonrelativistic kinematics.
#[pyfunction]
fn universal_nr(p: PyRef<'_, PyPotential>, x: f64) -> PyResult<f64> {
    afm::universal_nr(&p.0, x).map_err(to_py)
}

/// Checks one duality relation on `spec`.
#[pyfunction]
#[pyo3(signature = (relation, spec, q, p=None, sigma=None, beta=None, c=None, tol=duality::DEFAULT_TOL))]
#[allow(clippy::too_many_arguments)]
fn verify_relation<'py>(
    py: Python<'py>,
    relation: &str,
    spec: PyRef<'_, PySystemSpec>,
    q: f64,
    p: Option<usize>,
    sigma: Option<f64>,
    beta: Option<f64>,
    c: Option<f64>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let rel: RelationId = relation.parse().map_err(to_py)?;
    let report = duality::verify_relation(rel, &spec.0, q, &FreeParams { p, sigma, beta, c }, tol).map_err(to_py)?;
    to_object(py, &report)
}

/// Names of the catalogued relations.
#[pyfunction]
fn relations() -> Vec<&'static str> {
    RelationId::ALL.iter().map(|r| r.name()).collect()
}

/// Seeded sweep over the catalog; returns the summary dict.
#[pyfunction]
#[pyo3(signature = (seed=0, count=200, tol=duality::DEFAULT_TOL))]
fn sweep<'py>(py: Python<'py>, seed: u64, count: usize, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    let cfg = SweepConfig::new(seed, count, tol);
    let (_, summary) = py.detach(|| run_sweep(&cfg)).map_err(to_py)?;
    to_object(py, &summary)
}

/// Level (n, l) of p²/m + V(r).
#[pyfunction]
#[pyo3(signature = (m, v, n=0, l=0, points=100))]
fn solve_radial_2b(m: f64, v: PyRef<'_, PyPotential>, n: u32, l: u32, points: usize) -> PyResult<f64> {
    let cfg = MeshConfig { points, ..Default::default() };
    Ok(exact::solve_radial_2b(m, &v.0, n, l, &cfg).map_err(to_py)?.energy)
}

/// Two-body ground-state energy f(m) of p²/m + V(r).
#[pyfunction]
fn universal_f(v: PyRef<'_, PyPotential>, m: f64) -> PyResult<f64> {
    exact::universal_f_fn(&v.0, m).map_err(to_py)
}

/// Three-body spectrum of one (L, parity, symmetry) sector as a dict.
#[pyfunction]
#[pyo3(signature = (m, v, l_total=0, parity=1, symmetry="symmetric", bmax=20, b=None))]
#[allow(clippy::too_many_arguments)]
fn solve_3b<'py>(
    py: Python<'py>,
    m: f64,
    v: PyRef<'_, PyPotential>,
    l_total: u32,
    parity: i32,
    symmetry: &str,
    bmax: u32,
    b: Option<f64>,
) -> PyResult<Bound<'py, PyAny>> {
    let symmetry: Symmetry = symmetry.parse().map_err(to_py)?;
    let cfg = ThreeBodyBasisConfig { b, bmax, l_total, parity, symmetry };
    let v = v.0.clone();
    let spectrum = py.detach(|| exact::solve_3b(m, &v, &cfg)).map_err(to_py)?;
    let out = to_object(py, &spectrum)?;
    let entries: Vec<String> = spectrum.entries.iter().map(|e| e.display_label()).collect();
    for (i, label) in entries.into_iter().enumerate() {
        out.get_item("entries")?.get_item(i)?.set_item("label", label)?;
    }
    Ok(out)
}

/// Level (n, l) of σ√(p² + m²) + V(r).
#[pyfunction]
#[pyo3(signature = (sigma, m, v, n=0, l=0, basis_size=exact::salpeter::DEFAULT_BASIS_SIZE))]
fn solve_salpeter_2b(sigma: f64, m: f64, v: PyRef<'_, PyPotential>, n: u32, l: u32, basis_size: usize) -> PyResult<f64> {
    Ok(exact::solve_salpeter_2b(sigma, m, &v.0, n, l, basis_size).map_err(to_py)?.mass)
}

/// Effective mass of kind two_body, n_body or big_M.
#[pyfunction]
#[pyo3(signature = (kind, m, labels, n, prescription="ho"))]
fn effective_mass(kind: &str, m: f64, labels: &str, n: usize, prescription: &str) -> PyResult<f64> {
    let kind: MassKind = kind.parse().map_err(to_py)?;
    let labels: StateLabels = labels.parse().map_err(to_py)?;
    let p = prescription.parse::<PrescriptionChoice>().map_err(to_py)?.resolve(labels.len()).map_err(to_py)?;
    exact::effective_mass(kind, m, &labels, &p, n).map_err(to_py)
}

/// Level predicted from ground-state energies.
#[pyfunction]
#[pyo3(signature = (mode, m, v, n=2, labels=None, prescription="ho"))]
fn predict_spectrum(
    py: Python<'_>,
    mode: &str,
    m: f64,
    v: PyRef<'_, PyPotential>,
    n: usize,
    labels: Option<&str>,
    prescription: &str,
) -> PyResult<f64> {
    let mode: PredictMode = mode.parse().map_err(to_py)?;
    let labels = match labels {
        Some(s) => s.parse().map_err(to_py)?,
        None => StateLabels::ground(n).map_err(to_py)?,
    };
    let p = prescription.parse::<PrescriptionChoice>().map_err(to_py)?.resolve(labels.len()).map_err(to_py)?;
    let v = v.0.clone();
    py.detach(|| exact::predict_spectrum(mode, m, &labels, &p, n, &v)).map_err(to_py)
}

/// Rows of the linear-potential reference tables: `which` is table1 or table2.
#[pyfunction]
fn table<'py>(py: Python<'py>, which: &str) -> PyResult<Bound<'py, PyAny>> {
    let v = afm_duality::Potential::linear(1.0).map_err(to_py)?;
    match which {
        "table1" => to_object(py, &py.detach(|| tables::table1(tables::TABLE1_MASS, &v)).map_err(to_py)?),
        "table2" => to_object(py, &py.detach(|| tables::table2(tables::TABLE2_MASS, &v, 20)).map_err(to_py)?),
        other => Err(PyValueError::new_err(format!("unknown table `{other}` (table1, table2)"))),
    }
}

/// Ratio between the two- and three-body massless linear mass formulas.
#[pyfunction]
fn cross_duality_factor<'py>(py: Python<'py>, q: f64) -> PyResult<Bound<'py, PyAny>> {
    to_object(py, &studies::cross_duality_factor(q))
}

#[pymodule]
fn pyafm(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPotential>()?;
    m.add_class::<PySystemSpec>()?;
    m.add_function(wrap_pyfunction!(principal_number, m)?)?;
    m.add_function(wrap_pyfunction!(universal_ur, m)?)?;
    m.add_function(wrap_pyfunction!(universal_nr, m)?)?;
    m.add_function(wrap_pyfunction!(verify_relation, m)?)?;
    m.add_function(wrap_pyfunction!(relations, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(solve_radial_2b, m)?)?;
    m.add_function(wrap_pyfunction!(universal_f, m)?)?;
    m.add_function(wrap_pyfunction!(solve_3b, m)?)?;
    m.add_function(wrap_pyfunction!(solve_salpeter_2b, m)?)?;
    m.add_function(wrap_pyfunction!(effective_mass, m)?)?;
    m.add_function(wrap_pyfunction!(predict_spectrum, m)?)?;
    m.add_function(wrap_pyfunction!(table, m)?)?;
    m.add_function(wrap_pyfunction!(cross_duality_factor, m)?)?;
    Ok(())
}
