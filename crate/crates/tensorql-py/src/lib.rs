//! Python bindings: the sparse Boolean structures, dictionary-encoded
//! graphs, query evaluation and explanation, cardinality estimators, the
//! distinct-count sketch, and Boolean CP decomposition.
//!
//! Terms cross the boundary in N-Triples syntax (`<iri>`, `"literal"`,
//! `_:label`); unbound values come back as `None`.

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList};

use tensorql_core::cardinality as card;
use tensorql_core::cp;
use tensorql_core::query::{self, GraphSet, QueryOutcome};
use tensorql_core::store;
use tensorql_core::tensor::{Axis, BoolMatrix as CoreMatrix, BoolTensor3 as CoreTensor};
use tensorql_core::Error;

fn pyerr(err: Error) -> PyErr {
    match &err {
        Error::Unsupported(_) => PyValueError::new_err(err.to_string()),
        Error::QuerySyntax { .. } | Error::NTriples { .. } => {
            PyValueError::new_err(err.to_string())
        }
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn axis_from(mode: usize) -> PyResult<Axis> {
    Axis::from_index(mode).ok_or_else(|| PyValueError::new_err("mode must be 0, 1 or 2"))
}

/// Sparse binary matrix.
#[pyclass(name = "BoolMatrix", from_py_object)]
#[derive(Clone)]
struct PyBoolMatrix {
    inner: CoreMatrix,
}

#[pymethods]
impl PyBoolMatrix {
    #[new]
    fn new(rows: usize, cols: usize, coords: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(PyBoolMatrix {
            inner: CoreMatrix::from_coords(rows, cols, coords).map_err(pyerr)?,
        })
    }

    #[staticmethod]
    fn identity(n: usize) -> Self {
        PyBoolMatrix {
            inner: CoreMatrix::identity(n),
        }
    }

    #[getter]
    fn rows(&self) -> usize {
        self.inner.rows()
    }

    #[getter]
    fn cols(&self) -> usize {
        self.inner.cols()
    }

    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn coords(&self) -> Vec<(usize, usize)> {
        self.inner.iter().collect()
    }

    fn density(&self) -> f64 {
        self.inner.density()
    }

    fn sparsity(&self) -> f64 {
        self.inner.sparsity()
    }

    fn transpose(&self) -> Self {
        PyBoolMatrix {
            inner: self.inner.transpose(),
        }
    }

    fn kronecker(&self, other: &PyBoolMatrix) -> PyResult<Self> {
        Ok(PyBoolMatrix {
            inner: self.inner.kronecker(&other.inner).map_err(pyerr)?,
        })
    }

    fn khatri_rao(&self, other: &PyBoolMatrix) -> PyResult<Self> {
        Ok(PyBoolMatrix {
            inner: self.inner.khatri_rao(&other.inner).map_err(pyerr)?,
        })
    }

    fn matmul(&self, other: &PyBoolMatrix) -> PyResult<Self> {
        Ok(PyBoolMatrix {
            inner: self.inner.matmul(&other.inner).map_err(pyerr)?,
        })
    }

    fn and_(&self, other: &PyBoolMatrix) -> PyResult<Self> {
        Ok(PyBoolMatrix {
            inner: self.inner.and(&other.inner).map_err(pyerr)?,
        })
    }

    fn or_(&self, other: &PyBoolMatrix) -> PyResult<Self> {
        Ok(PyBoolMatrix {
            inner: self.inner.or(&other.inner).map_err(pyerr)?,
        })
    }

    fn and_not(&self, other: &PyBoolMatrix) -> PyResult<Self> {
        Ok(PyBoolMatrix {
            inner: self.inner.and_not(&other.inner).map_err(pyerr)?,
        })
    }

    fn column_counts(&self) -> Vec<u64> {
        self.inner.column_counts()
    }

    fn __repr__(&self) -> String {
        format!(
            "BoolMatrix({}x{}, nnz={})",
            self.inner.rows(),
            self.inner.cols(),
            self.inner.nnz()
        )
    }
}

/// Sparse binary 3-way tensor.
#[pyclass(name = "BoolTensor3", from_py_object)]
#[derive(Clone)]
struct PyBoolTensor3 {
    inner: CoreTensor,
}

#[pymethods]
impl PyBoolTensor3 {
    #[new]
    fn new(dims: (usize, usize, usize), coords: Vec<(usize, usize, usize)>) -> PyResult<Self> {
        Ok(PyBoolTensor3 {
            inner: CoreTensor::from_coords(dims, coords).map_err(pyerr)?,
        })
    }

    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        self.inner.dims()
    }

    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn coords(&self) -> Vec<(usize, usize, usize)> {
        self.inner.iter().collect()
    }

    fn density(&self) -> f64 {
        self.inner.density()
    }

    fn sparsity(&self) -> f64 {
        self.inner.sparsity()
    }

    /// 2-D restriction with one mode (0, 1 or 2) fixed.
    fn slice(&self, mode: usize, index: usize) -> PyResult<PyBoolMatrix> {
        Ok(PyBoolMatrix {
            inner: self.inner.slice(axis_from(mode)?, index).map_err(pyerr)?,
        })
    }

    /// Mode-`mode` unfolding; the earlier free mode varies fastest.
    fn matricize(&self, mode: usize) -> PyResult<PyBoolMatrix> {
        let (m, _) = self.inner.matricize(axis_from(mode)?).map_err(pyerr)?;
        Ok(PyBoolMatrix { inner: m })
    }

    fn __repr__(&self) -> String {
        let (n, m, l) = self.inner.dims();
        format!("BoolTensor3({n}x{m}x{l}, nnz={})", self.inner.nnz())
    }
}

/// Dictionary-encoded RDF graph backed by a Boolean tensor.
#[pyclass(name = "Graph")]
struct PyGraph {
    inner: store::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new() -> Self {
        PyGraph {
            inner: store::Graph::new(),
        }
    }

    /// Parses N-Triples text into a new graph.
    #[staticmethod]
    fn from_ntriples(text: &str) -> PyResult<Self> {
        Ok(PyGraph {
            inner: store::parse_ntriples_str(text).map_err(pyerr)?,
        })
    }

    /// Loads an N-Triples file.
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        let file = std::fs::File::open(path)
            .map_err(|e| PyRuntimeError::new_err(format!("cannot open {path}: {e}")))?;
        Ok(PyGraph {
            inner: store::load_ntriples(std::io::BufReader::new(file)).map_err(pyerr)?,
        })
    }

    #[getter]
    fn dims(&self) -> (usize, usize, usize) {
        self.inner.dims()
    }

    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn sparsity(&self) -> f64 {
        self.inner.tensor().sparsity()
    }

    /// Triples in coordinate order, as N-Triples formatted term strings.
    fn triples(&self) -> Vec<(String, String, String)> {
        self.inner
            .triples()
            .map(|(s, p, o)| (s.to_string(), p.to_string(), o.to_string()))
            .collect()
    }

    /// Adds a triple of N-Triples formatted terms; returns False when it was
    /// already present.
    fn add_triple(&mut self, s: &str, p: &str, o: &str) -> PyResult<bool> {
        let scope = self.inner.scope();
        let parse = |t: &str| store::parse_term(t, scope).map_err(pyerr);
        Ok(self.inner.add_triple(parse(s)?, parse(p)?, parse(o)?))
    }

    /// Removes a triple; returns False (a no-op) when it was absent.
    fn remove_triple(&mut self, s: &str, p: &str, o: &str) -> PyResult<bool> {
        let scope = self.inner.scope();
        let parse = |t: &str| store::parse_term(t, scope).map_err(pyerr);
        Ok(self.inner.remove_triple(&parse(s)?, &parse(p)?, &parse(o)?))
    }

    fn tensor(&self) -> PyBoolTensor3 {
        PyBoolTensor3 {
            inner: self.inner.tensor().clone(),
        }
    }

    /// (total_P, total_Q, total_R): each equals the triple count.
    fn marginal_totals(&self) -> (u64, u64, u64) {
        self.inner.stats().totals()
    }

    /// Combined nonzero count of the three marginal matrices.
    fn marginal_support(&self) -> usize {
        self.inner.stats().support()
    }

    fn to_ntriples(&self) -> String {
        store::ntriples_string(&self.inner)
    }

    fn __repr__(&self) -> String {
        let (n, m, l) = self.inner.dims();
        format!("Graph({n}x{m}x{l}, triples={})", self.inner.nnz())
    }
}

fn collect_graphs<'py>(
    graphs: &Bound<'py, PyDict>,
) -> PyResult<Vec<(String, PyRef<'py, PyGraph>)>> {
    let mut out = Vec::new();
    for (key, value) in graphs.iter() {
        let alias: String = key.extract()?;
        let graph: PyRef<'py, PyGraph> = value.extract()?;
        out.push((alias, graph));
    }
    if out.is_empty() {
        return Err(PyValueError::new_err("at least one graph is required"));
    }
    Ok(out)
}

fn build_set<'a>(held: &'a [(String, PyRef<'_, PyGraph>)]) -> PyResult<GraphSet<'a>> {
    let mut set = GraphSet::new();
    for (alias, graph) in held {
        set.add(alias.clone(), &graph.inner).map_err(pyerr)?;
    }
    Ok(set)
}

/// Evaluates a query against the given graphs (dict alias -> Graph; the
/// first entry is the default graph). SELECT yields a list of dicts with
/// term strings or None, ASK a bool, CONSTRUCT a Graph.
#[pyfunction]
fn run_query(py: Python<'_>, graphs: &Bound<'_, PyDict>, text: &str) -> PyResult<Py<PyAny>> {
    let held = collect_graphs(graphs)?;
    let set = build_set(&held)?;
    let parsed = query::parse(text).map_err(pyerr)?;
    let outcome = query::evaluate(&parsed, &set).map_err(pyerr)?;
    match outcome {
        QueryOutcome::Solutions(seq) => {
            let rows = PyList::empty(py);
            for row in seq.rows() {
                let obj = PyDict::new(py);
                for (var, term) in seq.vars().iter().zip(row) {
                    obj.set_item(var, term.as_ref().map(|t| t.to_string()))?;
                }
                rows.append(obj)?;
            }
            Ok(rows.into_any().unbind())
        }
        QueryOutcome::Boolean(b) => Ok(pyo3::types::PyBool::new(py, b)
            .to_owned()
            .into_any()
            .unbind()),
        QueryOutcome::Graph(g) => Ok(Bound::new(py, PyGraph { inner: *g })?.into_any().unbind()),
    }
}

/// Renders the join plan of a query, with per-step case and estimates.
#[pyfunction]
fn explain_query(graphs: &Bound<'_, PyDict>, text: &str) -> PyResult<String> {
    let held = collect_graphs(graphs)?;
    let set = build_set(&held)?;
    let parsed = query::parse(text).map_err(pyerr)?;
    let plan = query::plan(&parsed, &set).map_err(pyerr)?;
    let mut out = format!("plan: {} steps\n", plan.steps.len());
    for (i, step) in plan.steps.iter().enumerate() {
        out.push_str(&format!(
            "step {}: {} {} * {}\n",
            i + 1,
            step.op,
            step.left,
            step.right
        ));
        if let Some(case) = &step.case {
            out.push_str(&format!("  case: {case}\n"));
        }
        if let Some(path) = &step.distinct {
            out.push_str(&format!("  {path}\n"));
        }
        if let Some(bundle) = &step.estimate {
            for (label, est) in [
                ("exact", &bundle.exact),
                ("cosine upper bound", &bundle.cosine_upper),
                ("lower bound", &bundle.lower),
                ("upper bound", &bundle.upper),
                ("expected (uniform density)", &bundle.expected_uniform),
                ("expected (per-component density)", &bundle.expected_rank1),
            ] {
                if let Some(est) = est {
                    out.push_str(&format!("  {label}: {} (cost {})\n", est.value, est.cost));
                }
            }
        } else if let Some(reason) = &step.no_estimate_reason {
            out.push_str(&format!("  no estimate: {reason}\n"));
        }
    }
    Ok(out)
}

/// Exact Khatri-Rao nonzero count from two column-marginal vectors.
#[pyfunction]
fn kr_exact_count(sigma_a: Vec<u64>, sigma_b: Vec<u64>) -> PyResult<f64> {
    let sa = card::MarginalVector::from_dense(&sigma_a);
    let sb = card::MarginalVector::from_dense(&sigma_b);
    Ok(card::exact_kr_nnz(&sa, &sb).map_err(pyerr)?.value)
}

/// Cosine upper bound on the Khatri-Rao nonzero count.
#[pyfunction]
fn kr_cosine_bound(sigma_a: Vec<u64>, sigma_b: Vec<u64>) -> PyResult<f64> {
    let sa = card::MarginalVector::from_dense(&sigma_a);
    let sb = card::MarginalVector::from_dense(&sigma_b);
    Ok(card::kr_upper_cosine(&sa, &sb).map_err(pyerr)?.value)
}

/// (lower, upper) bounds for the distinct count of a Boolean product.
#[pyfunction]
fn boolean_product_bounds(sigma_a: Vec<u64>, sigma_b: Vec<u64>) -> PyResult<(f64, f64)> {
    let sa = card::MarginalVector::from_dense(&sigma_a);
    let sb = card::MarginalVector::from_dense(&sigma_b);
    let (lo, hi) = card::bool_product_bounds(&sa, &sb).map_err(pyerr)?;
    Ok((lo.value, hi.value))
}

/// Expected fill of a Boolean product under uniform densities.
#[pyfunction]
fn expected_density_uniform(p_a: f64, p_b: f64, k: usize) -> PyResult<f64> {
    card::expected_density_uniform(p_a, p_b, k).map_err(pyerr)
}

/// k-minimum-values distinct-count sketch.
#[pyclass(name = "KmvSketch")]
struct PyKmvSketch {
    inner: card::KmvSketch,
}

#[pymethods]
impl PyKmvSketch {
    #[new]
    #[pyo3(signature = (k, seed=None))]
    fn new(k: usize, seed: Option<u64>) -> PyResult<Self> {
        Ok(PyKmvSketch {
            inner: card::KmvSketch::new(k, seed.unwrap_or(card::DEFAULT_KMV_SEED))
                .map_err(pyerr)?,
        })
    }

    fn insert(&mut self, key: &str) {
        self.inner.insert_bytes(key.as_bytes());
    }

    fn insert_int(&mut self, key: u64) {
        self.inner.insert_u64(key);
    }

    fn estimate(&self) -> f64 {
        self.inner.estimate()
    }

    fn relative_std_error(&self) -> f64 {
        self.inner.relative_std_error()
    }
}

/// Boolean CP factors (three binary matrices of equal column count).
#[pyclass(name = "CpFactors", from_py_object)]
#[derive(Clone)]
struct PyCpFactors {
    inner: cp::CpFactors,
}

#[pymethods]
impl PyCpFactors {
    #[new]
    fn new(a: PyBoolMatrix, b: PyBoolMatrix, c: PyBoolMatrix) -> PyResult<Self> {
        Ok(PyCpFactors {
            inner: cp::CpFactors::new(a.inner, b.inner, c.inner).map_err(pyerr)?,
        })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn a(&self) -> PyBoolMatrix {
        PyBoolMatrix {
            inner: self.inner.a.clone(),
        }
    }

    #[getter]
    fn b(&self) -> PyBoolMatrix {
        PyBoolMatrix {
            inner: self.inner.b.clone(),
        }
    }

    #[getter]
    fn c(&self) -> PyBoolMatrix {
        PyBoolMatrix {
            inner: self.inner.c.clone(),
        }
    }

    fn nnz(&self) -> usize {
        self.inner.nnz()
    }

    fn reconstruct(&self) -> PyBoolTensor3 {
        PyBoolTensor3 {
            inner: cp::reconstruct(&self.inner),
        }
    }

    fn __repr__(&self) -> String {
        let (n, m, l) = self.inner.dims();
        format!("CpFactors(rank={}, dims={n}x{m}x{l})", self.inner.rank())
    }
}

/// Exact decomposition at the rank upper bound min(nm, nl, ml).
#[pyfunction]
fn naive_decomposition(tensor: &PyBoolTensor3) -> PyResult<PyCpFactors> {
    Ok(PyCpFactors {
        inner: cp::naive_decomposition(&tensor.inner).map_err(pyerr)?,
    })
}

/// Greedy cover decomposition; returns (factors, report dict).
#[pyfunction]
#[pyo3(signature = (tensor, rank, seed=0))]
fn greedy_cp(
    py: Python<'_>,
    tensor: &PyBoolTensor3,
    rank: usize,
    seed: u64,
) -> PyResult<(PyCpFactors, Py<PyAny>)> {
    let (factors, report) = cp::greedy_cp(&tensor.inner, &cp::GreedyOptions::new(rank, seed));
    Ok((
        PyCpFactors { inner: factors },
        report_dict(py, &report)?.unbind().into_any(),
    ))
}

/// Drops redundant components until the decomposition is irreducible.
#[pyfunction]
fn reduce_to_irreducible(factors: &PyCpFactors, tensor: &PyBoolTensor3) -> PyResult<PyCpFactors> {
    Ok(PyCpFactors {
        inner: cp::reduce_to_irreducible(&factors.inner, &tensor.inner).map_err(pyerr)?,
    })
}

/// Sparsity/bound report of a decomposition against its target tensor.
#[pyfunction]
fn verify_sparsity<'py>(
    py: Python<'py>,
    factors: &PyCpFactors,
    tensor: &PyBoolTensor3,
) -> PyResult<Bound<'py, PyDict>> {
    let report = cp::verify_sparsity(&factors.inner, &tensor.inner);
    report_dict(py, &report)
}

fn report_dict<'py>(py: Python<'py>, report: &cp::DecompReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("exact", report.exact)?;
    d.set_item("rank", report.rank)?;
    d.set_item("rank_upper_bound", report.rank_upper_bound)?;
    d.set_item("factor_nnz", report.factor_nnz)?;
    d.set_item("sparsity_a", report.sparsity_a)?;
    d.set_item("sparsity_b", report.sparsity_b)?;
    d.set_item("sparsity_c", report.sparsity_c)?;
    d.set_item("sparsity_t", report.sparsity_t)?;
    d.set_item("absolute_bound_holds", report.absolute_bound_holds)?;
    d.set_item("relative_bound_holds", report.relative_bound_holds)?;
    d.set_item("irreducible", report.irreducible)?;
    Ok(d)
}

#[pymodule]
fn tensorql(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBoolMatrix>()?;
    m.add_class::<PyBoolTensor3>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyKmvSketch>()?;
    m.add_class::<PyCpFactors>()?;
    m.add_function(wrap_pyfunction!(run_query, m)?)?;
    m.add_function(wrap_pyfunction!(explain_query, m)?)?;
    m.add_function(wrap_pyfunction!(kr_exact_count, m)?)?;
    m.add_function(wrap_pyfunction!(kr_cosine_bound, m)?)?;
    m.add_function(wrap_pyfunction!(boolean_product_bounds, m)?)?;
    m.add_function(wrap_pyfunction!(expected_density_uniform, m)?)?;
    m.add_function(wrap_pyfunction!(naive_decomposition, m)?)?;
    m.add_function(wrap_pyfunction!(greedy_cp, m)?)?;
    m.add_function(wrap_pyfunction!(reduce_to_irreducible, m)?)?;
    m.add_function(wrap_pyfunction!(verify_sparsity, m)?)?;
    Ok(())
}
