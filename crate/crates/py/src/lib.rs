//! Python bindings: `import q1py`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use q1_core::algorithm::{build_algorithm, max_simulation_error, sos_matrix};
use q1_core::census::{self as core_census, CensusOptions};
use q1_core::decider::{self, Outcome, RankReport};
use q1_core::linalg::format_rational;
use q1_core::representation;
use q1_core::{Error, Rational};

fn to_py_err(e: Error) -> PyErr {
    match e {
        Error::Internal(_) | Error::TheoremViolation(_) | Error::Io(_) | Error::Csv(_) | Error::Json(_) => {
            PyRuntimeError::new_err(e.to_string())
        }
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fractions<'py>(py: Python<'py>, values: &[Rational]) -> PyResult<Bound<'py, PyList>> {
    let fraction = py.import("fractions")?.getattr("Fraction")?;
    let items = values.iter().map(|v| fraction.call1((format_rational(v),))).collect::<PyResult<Vec<_>>>()?;
    PyList::new(py, items)
}

fn rank_dict<'py>(py: Python<'py>, r: &RankReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("r0", r.r0)?;
    d.set_item("r1", r.r1)?;
    d.set_item("k", r.k)?;
    d.set_item("f_value", r.f_value)?;
    d.set_item("passes", r.passes)?;
    Ok(d)
}

/// A partial Boolean function given as a trit string (`"011*1***"`) or as
/// `"zeros=[000];ones=[001,010,100]"`.
#[pyclass(name = "PartialBooleanFunction", module = "q1py", eq, frozen, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyFunction {
    inner: q1_core::PartialBooleanFunction,
}

#[pymethods]
impl PyFunction {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        Ok(Self { inner: q1_core::PartialBooleanFunction::parse(text).map_err(to_py_err)? })
    }

    #[staticmethod]
    fn from_sets(n: usize, zeros: Vec<usize>, ones: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: q1_core::PartialBooleanFunction::from_sets(n, &zeros, &ones).map_err(to_py_err)? })
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    /// `0`, `1` or `None` on input `x`.
    fn value(&self, x: usize) -> Option<bool> {
        self.inner.value(x)
    }

    fn zeros(&self) -> Vec<usize> {
        self.inner.zeros()
    }

    fn ones(&self) -> Vec<usize> {
        self.inner.ones()
    }

    fn domain(&self) -> Vec<usize> {
        self.inner.domain().collect()
    }

    fn is_constant(&self) -> bool {
        self.inner.is_constant()
    }

    fn difference_set(&self) -> PyResult<Vec<usize>> {
        Ok(self.inner.difference_set().map_err(to_py_err)?.elements().to_vec())
    }

    fn negate(&self) -> Self {
        Self { inner: self.inner.negate() }
    }

    fn restrict(&self, keep: Vec<usize>) -> PyResult<Self> {
        Ok(Self { inner: self.inner.restrict(&keep).map_err(to_py_err)? })
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("PartialBooleanFunction('{}')", self.inner)
    }
}

#[derive(FromPyObject)]
enum FunctionArg {
    Text(String),
    Function(PyFunction),
}

impl FunctionArg {
    fn resolve(self) -> PyResult<q1_core::PartialBooleanFunction> {
        match self {
            FunctionArg::Text(t) => q1_core::PartialBooleanFunction::parse(&t).map_err(to_py_err),
            FunctionArg::Function(f) => Ok(f.inner),
        }
    }
}

fn outcome_name(o: Outcome) -> &'static str {
    match o {
        Outcome::ZeroQuery => "ZeroQuery",
        Outcome::Feasible => "Feasible",
        Outcome::Infeasible => "Infeasible",
    }
}

/// Exact 1-query decision; witness and certificate entries are `Fraction`s.
#[pyfunction]
#[pyo3(signature = (f, use_filter = true))]
fn decide<'py>(py: Python<'py>, f: FunctionArg, use_filter: bool) -> PyResult<Bound<'py, PyDict>> {
    let f = f.resolve()?;
    let d = decider::decide_q1(&f, use_filter).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("function", f.to_string())?;
    out.set_item("outcome", outcome_name(d.outcome))?;
    out.set_item("witness", d.witness.as_deref().map(|w| fractions(py, w)).transpose()?)?;
    out.set_item("certificate", d.certificate.as_deref().map(|c| fractions(py, c)).transpose()?)?;
    out.set_item("rank_report", d.rank_report.as_ref().map(|r| rank_dict(py, r)).transpose()?)?;
    Ok(out)
}

/// Degree, dependence and the rank filter.
#[pyfunction]
fn analyze<'py>(py: Python<'py>, f: FunctionArg) -> PyResult<Bound<'py, PyDict>> {
    let f = f.resolve()?;
    let dep = representation::depends_on(&f).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("function", f.to_string())?;
    out.set_item("degree", representation::degree(&f).map_err(to_py_err)?)?;
    out.set_item("k", dep.k)?;
    out.set_item("variables", dep.variables)?;
    let report = if f.is_non_constant() { Some(decider::rank_filter(&f).map_err(to_py_err)?) } else { None };
    out.set_item("rank_report", report.as_ref().map(|r| rank_dict(py, r)).transpose()?)?;
    Ok(out)
}

/// Builds the 1-query algorithm and returns `P(output = 1)` for every input.
#[pyfunction]
fn simulate<'py>(py: Python<'py>, f: FunctionArg) -> PyResult<Bound<'py, PyDict>> {
    let f = f.resolve()?;
    let d = decider::decide_q1(&f, false).map_err(to_py_err)?;
    let beta = d
        .witness
        .ok_or_else(|| PyValueError::new_err(format!("{f} is not computable with one exact query")))?;
    let alg = build_algorithm(&f, &beta).map_err(to_py_err)?;
    let sos = sos_matrix(&alg, &f).map_err(to_py_err)?;
    let out = PyDict::new(py);
    out.set_item("function", f.to_string())?;
    out.set_item("witness", fractions(py, &beta)?)?;
    out.set_item("amplitudes", alg.amplitudes().iter().copied().collect::<Vec<f64>>())?;
    out.set_item("p_one", (0..1usize << f.n()).map(|x| alg.accept_probability(x)).collect::<Vec<f64>>())?;
    out.set_item("max_error", max_simulation_error(&alg, &f))?;
    out.set_item("gram_diagonal", sos.gram_diagonal.clone())?;
    out.set_item("gram_off_diagonal_max", sos.gram_off_diagonal_max())?;
    out.set_item("nonzero_query_columns", sos.nonzero_query_columns())?;
    Ok(out)
}

/// Exhaustive census on `n ≤ 4` bits; returns `N₁(n, k)` keyed by `k`.
#[pyfunction]
#[pyo3(signature = (n, shards = None))]
fn census<'py>(py: Python<'py>, n: usize, shards: Option<usize>) -> PyResult<Bound<'py, PyDict>> {
    let defaults = CensusOptions::default();
    let opts = CensusOptions { shards: shards.unwrap_or(defaults.shards), ..defaults };
    let report = py.detach(|| core_census::census_q1(n, &opts)).map_err(to_py_err)?;
    let out = PyDict::new(py);
    let n1 = PyDict::new(py);
    for r in &report.records {
        n1.set_item(r.k, r.n1)?;
    }
    out.set_item("n", n)?;
    out.set_item("total", report.total)?;
    out.set_item("n1", n1)?;
    out.set_item("depending_on_all_bits", report.totals.depending[n])?;
    out.set_item("theorem2", report.theorem2)?;
    out.set_item("filter_unsound", report.totals.filter_unsound)?;
    Ok(out)
}

/// Feasible functions depending on all `n` bits; raises if the set is not the expected catalogue.
#[pyfunction]
fn verify_theorem2(py: Python<'_>, n: usize) -> PyResult<Vec<String>> {
    let report = py.detach(|| core_census::verify_theorem2(n, &CensusOptions::default())).map_err(to_py_err)?;
    Ok(report.found)
}

/// `(T, members)` for the coefficient-sum-1 span of `points` on `n` bits.
#[pyfunction]
fn affine_span_count(n: usize, points: Vec<usize>) -> PyResult<(usize, Vec<String>)> {
    let r = core_census::affine_span_count(n, &points).map_err(to_py_err)?;
    Ok((r.t, r.members))
}

#[pymodule]
fn q1py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyFunction>()?;
    m.add_function(wrap_pyfunction!(decide, m)?)?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(simulate, m)?)?;
    m.add_function(wrap_pyfunction!(census, m)?)?;
    m.add_function(wrap_pyfunction!(verify_theorem2, m)?)?;
    m.add_function(wrap_pyfunction!(affine_span_count, m)?)?;
    Ok(())
}
