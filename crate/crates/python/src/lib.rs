//! Python bindings for `ergolab`.
//!
//! Structured results cross the boundary as plain dicts and lists; complex
//! numbers become Python `complex`.

use std::collections::BTreeMap;
use std::path::PathBuf;

use ergolab::joinings::{self, FiniteSystem};
use ergolab::limits::{self, LimitScheme};
use ergolab::mixing::{self, Budget, CandidateSequence};
use ergolab::operator::{self, ComplexMatrix};
use ergolab::scenario;
use ergolab::spectral;
use ergolab::systems::{self, cantor, chacon, iet, rudin_shapiro, BaseMeasure, Quality};
use ergolab::{Complex64, Error};
use pyo3::exceptions::{PyArithmeticError, PyNotImplementedError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};
use serde::de::DeserializeOwned;
use serde::Serialize;

fn err(e: Error) -> PyErr {
    match e {
        Error::Capability(_) => PyNotImplementedError::new_err(e.to_string()),
        Error::NotConverged { .. } | Error::Numerical(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn scenario_err(e: scenario::ScenarioError) -> PyErr {
    match e {
        scenario::ScenarioError::Io(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

fn from_py<T: DeserializeOwned>(obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = obj.py().import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(|e| PyValueError::new_err(e.to_string()))
}

fn quality(exact: bool, orbit_length: usize, seed: Option<u64>) -> Quality {
    if exact {
        Quality::Exact
    } else {
        Quality::Empirical { orbit_length, seed }
    }
}

fn complex<'py>(py: Python<'py>, z: Complex64) -> Bound<'py, PyComplex> {
    PyComplex::from_doubles(py, z.re, z.im)
}

fn matrix(rows: Vec<Vec<Complex64>>) -> PyResult<ComplexMatrix> {
    ComplexMatrix::from_rows(&rows).map_err(err)
}

fn matrix_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64>> {
    (0..m.dim()).map(|i| (0..m.dim()).map(|j| m.get(i, j)).collect()).collect()
}

/// A measure-preserving system.
#[pyclass(name = "System", module = "pyergolab", frozen)]
struct PySystem(systems::System);

#[pymethods]
impl PySystem {
    #[staticmethod]
    fn rotation(alpha: f64) -> PyResult<Self> {
        systems::System::rotation(alpha).map(PySystem).map_err(err)
    }

    /// `base` is `"lebesgue"` or `"cantor4"`.
    #[staticmethod]
    #[pyo3(signature = (base = "lebesgue", truncation = cantor::DEFAULT_TRUNCATION))]
    fn skew_torus(base: &str, truncation: u32) -> PyResult<Self> {
        let base = match base {
            "lebesgue" => BaseMeasure::Lebesgue,
            "cantor4" => BaseMeasure::Cantor4 { truncation },
            other => return Err(PyValueError::new_err(format!("unknown base measure `{other}`"))),
        };
        systems::System::skew_torus(base).map(PySystem).map_err(err)
    }

    #[staticmethod]
    fn chacon() -> Self {
        PySystem(systems::System::chacon())
    }

    #[staticmethod]
    fn rudin_shapiro() -> Self {
        PySystem(systems::System::rudin_shapiro())
    }

    #[staticmethod]
    fn iet(lengths: Vec<f64>, permutation: Vec<usize>) -> PyResult<Self> {
        systems::System::iet(&lengths, &permutation).map(PySystem).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (probabilities, seed = 0))]
    fn bernoulli(probabilities: Vec<f64>, seed: u64) -> PyResult<Self> {
        systems::System::bernoulli(&probabilities, seed).map(PySystem).map_err(err)
    }

    /// Builds a system from its descriptor, e.g. `{"name": "r", "family": "rotation", "alpha": 0.3}`.
    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        let sys: systems::System = from_py(d)?;
        sys.validate().map_err(err)?;
        Ok(PySystem(sys))
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[pyo3(signature = (f, exact = false, orbit_length = 1_000_000, seed = None))]
    fn mean<'py>(
        &self,
        py: Python<'py>,
        f: &PyObservable,
        exact: bool,
        orbit_length: usize,
        seed: Option<u64>,
    ) -> PyResult<Bound<'py, PyComplex>> {
        let m = self.0.mean(&f.0, quality(exact, orbit_length, seed)).map_err(err)?;
        Ok(complex(py, m))
    }

    /// `f(Tⁿx)` for `n < length` along one orbit.
    #[pyo3(signature = (f, length, seed = None))]
    fn sample_path(&self, f: &PyObservable, length: usize, seed: Option<u64>) -> PyResult<Vec<Complex64Py>> {
        let path = self.0.sample_path(&f.0, length, seed).map_err(err)?;
        Ok(path.into_iter().map(Complex64Py).collect())
    }

    fn __repr__(&self) -> String {
        format!("System({:?})", self.0.name)
    }
}

/// An observable on a system: a character, a cylinder or an interval indicator.
#[pyclass(name = "Observable", module = "pyergolab", frozen, from_py_object)]
#[derive(Clone)]
struct PyObservable(systems::Observable);

#[pymethods]
impl PyObservable {
    #[staticmethod]
    fn character(frequencies: Vec<i64>) -> Self {
        PyObservable(systems::Observable::character(&frequencies))
    }

    #[staticmethod]
    #[pyo3(signature = (word, offset = 0))]
    fn cylinder(word: &str, offset: i64) -> Self {
        PyObservable(systems::Observable::cylinder(word, offset))
    }

    #[staticmethod]
    #[pyo3(signature = (words, offset = 0))]
    fn cylinder_union(words: Vec<String>, offset: i64) -> Self {
        let words: Vec<&str> = words.iter().map(String::as_str).collect();
        PyObservable(systems::Observable::cylinder_union(&words, offset))
    }

    #[staticmethod]
    fn interval(a: f64, b: f64) -> Self {
        PyObservable(systems::Observable::interval(a, b))
    }

    #[staticmethod]
    fn from_dict(d: &Bound<'_, PyAny>) -> PyResult<Self> {
        let obs: systems::Observable = from_py(d)?;
        obs.validate().map_err(err)?;
        Ok(PyObservable(obs))
    }

    /// A copy with its mean subtracted.
    fn centered(&self) -> Self {
        PyObservable(self.0.clone().centered())
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn is_centered(&self) -> bool {
        self.0.centered
    }

    fn __repr__(&self) -> String {
        format!("Observable({:?}{})", self.0.name, if self.0.centered { ", centered" } else { "" })
    }
}

/// Newtype so vectors of complex numbers convert to lists of Python `complex`.
struct Complex64Py(Complex64);

impl<'py> IntoPyObject<'py> for Complex64Py {
    type Target = PyComplex;
    type Output = Bound<'py, PyComplex>;
    type Error = std::convert::Infallible;

    fn into_pyobject(self, py: Python<'py>) -> Result<Self::Output, Self::Error> {
        Ok(complex(py, self.0))
    }
}

impl<'a, 'py> FromPyObject<'a, 'py> for Complex64Py {
    type Error = PyErr;

    fn extract(obj: Borrowed<'a, 'py, PyAny>) -> PyResult<Self> {
        if let Ok(z) = obj.cast::<PyComplex>() {
            return Ok(Complex64Py(Complex64::new(z.real(), z.imag())));
        }
        let re: f64 = obj.extract()?;
        Ok(Complex64Py(Complex64::new(re, 0.0)))
    }
}

fn unwrap_rows(rows: Vec<Vec<Complex64Py>>) -> Vec<Vec<Complex64>> {
    rows.into_iter().map(|r| r.into_iter().map(|z| z.0).collect()).collect()
}

fn wrap_rows(m: &ComplexMatrix) -> Vec<Vec<Complex64Py>> {
    matrix_rows(m).into_iter().map(|r| r.into_iter().map(Complex64Py).collect()).collect()
}

/// Values `⟨Tⁿf, g⟩` at a set of lags.
#[pyclass(name = "CorrelationSequence", module = "pyergolab", frozen)]
struct PyCorrelation(systems::CorrelationSequence);

#[pymethods]
impl PyCorrelation {
    /// Wraps explicit values (a `{lag: complex}` dict).
    #[staticmethod]
    #[pyo3(signature = (values, autocorrelation = false))]
    fn from_values(values: BTreeMap<i64, Complex64Py>, autocorrelation: bool) -> PyResult<Self> {
        let values = values.into_iter().map(|(k, v)| (k, v.0)).collect();
        systems::CorrelationSequence::from_values(values, autocorrelation).map(PyCorrelation).map_err(err)
    }

    fn values<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let d = PyDict::new(py);
        for (lag, v) in &self.0.values {
            d.set_item(lag, complex(py, *v))?;
        }
        Ok(d)
    }

    fn stderr(&self) -> BTreeMap<i64, f64> {
        self.0.stderr.clone()
    }

    fn lags(&self) -> Vec<i64> {
        self.0.lags().collect()
    }

    fn __getitem__<'py>(&self, py: Python<'py>, lag: i64) -> PyResult<Bound<'py, PyComplex>> {
        self.0
            .get(lag)
            .map(|v| complex(py, v))
            .ok_or_else(|| pyo3::exceptions::PyKeyError::new_err(lag))
    }

    fn __len__(&self) -> usize {
        self.0.values.len()
    }

    #[getter]
    fn mass<'py>(&self, py: Python<'py>) -> Bound<'py, PyComplex> {
        complex(py, self.0.mass)
    }

    #[getter]
    fn centered(&self) -> bool {
        self.0.centered
    }

    /// Limit along a scheme given as a dict, e.g. `{"kind": "subsequence", "indices": [...]}`.
    fn limit<'py>(&self, py: Python<'py>, scheme: &Bound<'_, PyAny>, tol: f64) -> PyResult<Bound<'py, PyAny>> {
        let scheme: LimitScheme = from_py(scheme)?;
        to_py(py, &limits::evaluate_limit(&self.0, &scheme, tol).map_err(err)?)
    }

    /// Fejér estimate of the spectral measure on `m` grid points.
    #[pyo3(signature = (m = 1024))]
    fn spectral_estimate<'py>(&self, py: Python<'py>, m: usize) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &spectral::fejer_estimate(&self.0, m).map_err(err)?)
    }

    /// `(1/(2N+1)) Σ_{|n|≤N} |c(n)|²`.
    fn atom_mass(&self, n: usize) -> PyResult<f64> {
        spectral::wiener_atom_mass(&self.0, n).map_err(err)
    }

    #[pyo3(signature = (thresholds = vec![0.1, 0.05, 0.01]))]
    fn rajchman_report<'py>(&self, py: Python<'py>, thresholds: Vec<f64>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &spectral::rajchman_report(&self.0, &thresholds).map_err(err)?)
    }

    /// Coefficients of the convolved spectral measure, `c₁(n)·c₂(n)`.
    fn convolve(&self, other: &PyCorrelation) -> PyResult<Self> {
        spectral::convolve_coefficients(&self.0, &other.0).map(PyCorrelation).map_err(err)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.0)
    }

    fn __repr__(&self) -> String {
        format!("CorrelationSequence({} lags, max {})", self.0.values.len(), self.0.max_lag())
    }
}

/// `⟨Tⁿf, g⟩` for each lag (`g` defaults to `f`).
#[pyfunction]
#[pyo3(signature = (system, f, lags, g = None, exact = false, orbit_length = 1_000_000, seed = None))]
fn correlation(
    system: &PySystem,
    f: &PyObservable,
    lags: Vec<i64>,
    g: Option<&PyObservable>,
    exact: bool,
    orbit_length: usize,
    seed: Option<u64>,
) -> PyResult<PyCorrelation> {
    let g = g.unwrap_or(f);
    systems::correlation(&system.0, &f.0, &g.0, &lags, quality(exact, orbit_length, seed))
        .map(PyCorrelation)
        .map_err(err)
}

/// Fourier coefficient `∫ e^{-2πinx} dμ` of the base-4 Cantor measure.
#[pyfunction]
#[pyo3(signature = (n, truncation = cantor::DEFAULT_TRUNCATION))]
fn cantor_fourier(py: Python<'_>, n: i64, truncation: u32) -> Bound<'_, PyComplex> {
    complex(py, cantor::cantor_fourier(n, truncation))
}

#[pyfunction]
fn chacon_heights(count: usize) -> PyResult<Vec<u64>> {
    chacon::chacon_heights(count).map_err(err)
}

#[pyfunction]
fn rudin_shapiro_sequence(length: usize) -> PyResult<Vec<i8>> {
    rudin_shapiro::rudin_shapiro_sequence(length).map_err(err)
}

#[pyfunction]
fn iet_apply(lengths: Vec<f64>, permutation: Vec<usize>, x: f64) -> PyResult<f64> {
    iet::iet_apply(&lengths, &permutation, x).map_err(err)
}

/// Weak / mild / strong mixing verdicts from centered observables.
#[pyfunction]
#[pyo3(signature = (system, observables, max_lag = 10_000, orbit_length = 1_000_000, ip_families = 4, ip_depth = 8, seed = 0))]
#[allow(clippy::too_many_arguments)]
fn classify<'py>(
    py: Python<'py>,
    system: &PySystem,
    observables: Vec<PyObservable>,
    max_lag: i64,
    orbit_length: usize,
    ip_families: usize,
    ip_depth: usize,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let obs: Vec<_> = observables.into_iter().map(|o| o.0).collect();
    let budget = Budget { max_lag, orbit_length, ip_families, ip_depth, seed };
    to_py(py, &mixing::classify(&system.0, &obs, &budget).map_err(err)?)
}

/// Best return ratio `μ(A ∩ T^{n_k}A)/μ(A)` over candidate sequences.
///
/// `candidates` maps names to index lists; by default the system's own
/// candidates up to `max_lag` are used.
#[pyfunction]
#[pyo3(signature = (system, f, candidates = None, depth = 24, max_lag = 1_000_000, exact = false, orbit_length = 1_000_000))]
#[allow(clippy::too_many_arguments)]
fn rigidity_search<'py>(
    py: Python<'py>,
    system: &PySystem,
    f: &PyObservable,
    candidates: Option<BTreeMap<String, Vec<i64>>>,
    depth: usize,
    max_lag: i64,
    exact: bool,
    orbit_length: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let candidates = match candidates {
        Some(c) => c.into_iter().map(|(name, indices)| CandidateSequence { name, indices }).collect(),
        None => mixing::default_candidates(&system.0, max_lag),
    };
    let profile = mixing::rigidity_search(&system.0, &f.0, &candidates, depth, quality(exact, orbit_length, None))
        .map_err(err)?;
    to_py(py, &profile)
}

/// Whether `m` commutes with its adjoint up to `tol`.
#[pyfunction]
#[pyo3(signature = (rows, tol = None))]
fn check_normal(rows: Vec<Vec<Complex64Py>>, tol: Option<f64>) -> PyResult<bool> {
    let m = matrix(unwrap_rows(rows))?;
    let tol = tol.unwrap_or_else(|| operator::default_tolerance(&m));
    operator::check_normal(&m, tol).map_err(err)
}

/// Orthogonal projectors onto the closure of the image and onto the kernel.
#[pyfunction]
#[pyo3(signature = (rows, tol = None))]
fn image_kernel_decomposition(
    rows: Vec<Vec<Complex64Py>>,
    tol: Option<f64>,
) -> PyResult<(Vec<Vec<Complex64Py>>, Vec<Vec<Complex64Py>>)> {
    let m = matrix(unwrap_rows(rows))?;
    let tol = tol.unwrap_or_else(|| operator::default_tolerance(&m));
    let d = operator::image_kernel_decomposition(&m, tol).map_err(err)?;
    Ok((wrap_rows(&d.p_image), wrap_rows(&d.p_kernel)))
}

/// Limit of `Uⁿ` along a scheme dict, e.g. `{"kind": "subsequence", "indices": [...]}`.
#[pyfunction]
fn sequence_limit_operator<'py>(
    py: Python<'py>,
    rows: Vec<Vec<Complex64Py>>,
    scheme: &Bound<'_, PyAny>,
    tol: f64,
) -> PyResult<Bound<'py, PyAny>> {
    let u = matrix(unwrap_rows(rows))?;
    let scheme: LimitScheme = from_py(scheme)?;
    to_py(py, &limits::limit_operator(&u, &scheme, tol).map_err(err)?)
}

/// A permutation of `{0..n}` with an invariant probability vector.
#[pyclass(name = "FiniteSystem", module = "pyergolab", frozen)]
struct PyFiniteSystem(FiniteSystem);

#[pymethods]
impl PyFiniteSystem {
    /// `measure` entries are fractions such as `"1/3"`; the default is uniform.
    #[new]
    #[pyo3(signature = (map, measure = None))]
    fn new(map: Vec<usize>, measure: Option<Vec<String>>) -> PyResult<Self> {
        let sys = match measure {
            None => FiniteSystem::uniform(map),
            Some(m) => {
                let measure = m
                    .iter()
                    .map(|s| s.trim().parse::<joinings::Rational>())
                    .collect::<Result<Vec<_>, _>>()
                    .map_err(|e| PyValueError::new_err(format!("bad fraction: {e}")))?;
                FiniteSystem::new(map, measure)
            }
        };
        sys.map(PyFiniteSystem).map_err(err)
    }

    #[staticmethod]
    fn cyclic(n: usize) -> PyResult<Self> {
        FiniteSystem::cyclic(n).map(PyFiniteSystem).map_err(err)
    }

    #[getter]
    fn map(&self) -> Vec<usize> {
        self.0.map.clone()
    }

    #[getter]
    fn measure(&self) -> Vec<String> {
        self.0.measure.iter().map(|r| r.to_string()).collect()
    }

    fn is_ergodic(&self) -> bool {
        self.0.is_ergodic()
    }

    fn cycles(&self) -> Vec<Vec<usize>> {
        self.0.cycles()
    }

    fn __len__(&self) -> usize {
        self.0.size()
    }

    fn __repr__(&self) -> String {
        format!("FiniteSystem({:?})", self.0.map)
    }
}

/// Dimension, product coupling and a spanning set of the joining polytope.
#[pyfunction]
fn joining_polytope<'py>(py: Python<'py>, x: &PyFiniteSystem, y: &PyFiniteSystem) -> PyResult<Bound<'py, PyAny>> {
    to_py(py, &joinings::joining_polytope(&x.0, &y.0).map_err(err)?)
}

#[pyfunction]
fn is_disjoint(x: &PyFiniteSystem, y: &PyFiniteSystem) -> PyResult<bool> {
    joinings::is_disjoint(&x.0, &y.0).map_err(err)
}

/// Vertices of the joining polytope as matrices of fraction strings.
#[pyfunction]
fn extreme_joinings(x: &PyFiniteSystem, y: &PyFiniteSystem) -> PyResult<(Vec<Vec<Vec<String>>>, bool)> {
    let e = joinings::extreme_joinings(&x.0, &y.0).map_err(err)?;
    Ok((e.vertices.iter().map(joinings::coupling_to_strings).collect(), e.partial))
}

#[pyfunction]
fn list_builtin_scenarios() -> Vec<&'static str> {
    scenario::list_builtin_scenarios()
}

/// Runs a builtin scenario or a scenario file and returns its summary.
#[pyfunction]
#[pyo3(signature = (name_or_path, seed = None, out = None))]
fn run_scenario<'py>(
    py: Python<'py>,
    name_or_path: &str,
    seed: Option<u64>,
    out: Option<PathBuf>,
) -> PyResult<Bound<'py, PyAny>> {
    let sc = scenario::load(name_or_path).map_err(scenario_err)?;
    let summary = sc.run(seed, out.as_deref()).map_err(scenario_err)?;
    to_py(py, &summary)
}

#[pymodule]
fn pyergolab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyObservable>()?;
    m.add_class::<PyCorrelation>()?;
    m.add_class::<PyFiniteSystem>()?;
    m.add_function(wrap_pyfunction!(correlation, m)?)?;
    m.add_function(wrap_pyfunction!(cantor_fourier, m)?)?;
    m.add_function(wrap_pyfunction!(chacon_heights, m)?)?;
    m.add_function(wrap_pyfunction!(rudin_shapiro_sequence, m)?)?;
    m.add_function(wrap_pyfunction!(iet_apply, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(rigidity_search, m)?)?;
    m.add_function(wrap_pyfunction!(check_normal, m)?)?;
    m.add_function(wrap_pyfunction!(image_kernel_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(sequence_limit_operator, m)?)?;
    m.add_function(wrap_pyfunction!(joining_polytope, m)?)?;
    m.add_function(wrap_pyfunction!(is_disjoint, m)?)?;
    m.add_function(wrap_pyfunction!(extreme_joinings, m)?)?;
    m.add_function(wrap_pyfunction!(list_builtin_scenarios, m)?)?;
    m.add_function(wrap_pyfunction!(run_scenario, m)?)?;
    Ok(())
}
