//! Python bindings. Rationals go in as anything whose `str()` is `"p"` or
//! `"p/q"` (ints, `fractions.Fraction`, strings) and come out as
//! `fractions.Fraction`. Indices are 0-based.

use gcx_core::cli::{execute, Format, Overrides, Subcommand};
use gcx_core::courant::{classify_courant_tensor, commutant_solve, CommutantStage, GenEndomorphism};
use gcx_core::derived;
use gcx_core::leibniz::{self, StructureConstants, TensorEndo};
use gcx_core::rational::parse_rational;
use gcx_core::{Matrix, Q};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use std::sync::Arc;

fn err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_q(obj: &Bound<'_, PyAny>) -> PyResult<Q> {
    parse_rational(obj.str()?.to_str()?).map_err(err)
}

fn to_matrix(rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Matrix> {
    let rows = rows.iter().map(|r| r.iter().map(to_q).collect::<PyResult<Vec<_>>>()).collect::<PyResult<Vec<_>>>()?;
    Matrix::from_rows(rows).map_err(err)
}

fn fraction<'py>(py: Python<'py>, q: &Q) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((q.to_string(),))
}

fn opt_fraction<'py>(py: Python<'py>, q: &Option<Q>) -> PyResult<Option<Bound<'py, PyAny>>> {
    q.as_ref().map(|q| fraction(py, q)).transpose()
}

#[pyclass(name = "GradedContext", frozen)]
struct PyContext(Arc<gcx_core::GradedContext>);

#[pymethods]
impl PyContext {
    /// `n` base coordinates and a symmetric invertible `m × m` metric.
    #[new]
    fn new(n: usize, metric: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<Self> {
        Ok(PyContext(gcx_core::GradedContext::new(n, to_matrix(metric)?).map_err(err)?))
    }

    /// `ξ^1..ξ^n, ψ_1..ψ_n` with `g = [[0, I], [I, 0]]`.
    #[staticmethod]
    fn hyperbolic(n: usize) -> Self {
        PyContext(gcx_core::GradedContext::hyperbolic(n))
    }

    #[staticmethod]
    fn euclidean(n: usize, m: usize) -> Self {
        PyContext(gcx_core::GradedContext::euclidean(n, m))
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn m(&self) -> usize {
        self.0.m()
    }

    fn x(&self, i: usize) -> PyResult<PySuper> {
        self.check(i, self.0.n())?;
        Ok(PySuper(gcx_core::SuperPolynomial::x(&self.0, i)))
    }

    fn p(&self, i: usize) -> PyResult<PySuper> {
        self.check(i, self.0.n())?;
        Ok(PySuper(gcx_core::SuperPolynomial::p(&self.0, i)))
    }

    fn theta(&self, a: usize) -> PyResult<PySuper> {
        self.check(a, self.0.m())?;
        Ok(PySuper(gcx_core::SuperPolynomial::theta(&self.0, a)))
    }

    fn constant(&self, c: &Bound<'_, PyAny>) -> PyResult<PySuper> {
        Ok(PySuper(gcx_core::SuperPolynomial::constant(&self.0, to_q(c)?)))
    }
}

impl PyContext {
    fn check(&self, i: usize, bound: usize) -> PyResult<()> {
        if i < bound {
            Ok(())
        } else {
            Err(err(format!("index {i} out of range 0..{bound}")))
        }
    }
}

#[pyclass(name = "SuperPolynomial", frozen)]
struct PySuper(gcx_core::SuperPolynomial);

#[pymethods]
impl PySuper {
    fn __add__(&self, other: &PySuper) -> PyResult<PySuper> {
        self.0.try_add(&other.0).map(PySuper).map_err(err)
    }

    fn __sub__(&self, other: &PySuper) -> PyResult<PySuper> {
        self.0.try_sub(&other.0).map(PySuper).map_err(err)
    }

    fn __mul__(&self, other: &PySuper) -> PyResult<PySuper> {
        self.0.multiply(&other.0).map(PySuper).map_err(err)
    }

    fn __neg__(&self) -> PySuper {
        PySuper(-&self.0)
    }

    fn __eq__(&self, other: &PySuper) -> bool {
        self.0 == other.0
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("SuperPolynomial({})", self.0)
    }

    fn scale(&self, c: &Bound<'_, PyAny>) -> PyResult<PySuper> {
        Ok(PySuper(self.0.scale(&to_q(c)?)))
    }

    /// The Poisson superbracket `{self, other}`.
    fn bracket(&self, other: &PySuper) -> PyResult<PySuper> {
        self.0.poisson_bracket(&other.0).map(PySuper).map_err(err)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    /// `None` unless homogeneous.
    fn degree(&self) -> Option<u32> {
        self.0.homogeneous_degree()
    }

    fn degree_components(&self) -> Vec<(u32, PySuper)> {
        self.0.degree_components().into_iter().map(|(d, f)| (d, PySuper(f))).collect()
    }
}

#[pyclass(name = "LeibnizAlgebra", frozen)]
struct PyLeibniz(leibniz::LeibnizAlgebra);

#[pymethods]
impl PyLeibniz {
    /// `c[a][b][d]` is the `e_d` component of `e_a ∘ e_b`.
    #[new]
    fn new(c: Vec<Vec<Vec<Bound<'_, PyAny>>>>) -> PyResult<Self> {
        let c = c
            .iter()
            .map(|rows| rows.iter().map(|v| v.iter().map(to_q).collect()).collect())
            .collect::<PyResult<Vec<Vec<Vec<Q>>>>>()?;
        Ok(PyLeibniz(leibniz::LeibnizAlgebra::new(StructureConstants::from_nested(c).map_err(err)?)))
    }

    #[staticmethod]
    fn cross_product() -> Self {
        PyLeibniz(leibniz::LeibnizAlgebra::cross_product())
    }

    #[staticmethod]
    fn abelian(dim: usize) -> Self {
        PyLeibniz(leibniz::LeibnizAlgebra::abelian(dim))
    }

    #[getter]
    fn dim(&self) -> usize {
        self.0.dim()
    }

    fn jacobi_check(&self) -> bool {
        leibniz::jacobi_check(&self.0)
    }

    /// The algebra with product `∘_N`.
    fn contracted(&self, tensor: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<PyLeibniz> {
        let n = self.tensor(tensor)?;
        Ok(PyLeibniz(leibniz::LeibnizAlgebra::new(leibniz::contracted_product(&self.0, &n).map_err(err)?)))
    }

    /// `{"torsion_zero", "cocycle", "classification"}`.
    fn classify_tensor<'py>(&self, py: Python<'py>, tensor: Vec<Vec<Bound<'py, PyAny>>>) -> PyResult<Bound<'py, PyDict>> {
        let report = leibniz::classify_tensor(&self.0, &self.tensor(tensor)?).map_err(err)?;
        let out = PyDict::new(py);
        out.set_item("torsion_zero", report.torsion_zero)?;
        out.set_item("cocycle", report.cocycle)?;
        out.set_item("classification", report.classification.to_string())?;
        Ok(out)
    }

    /// The cubic Hamiltonian of the algebra on an `n = 0` context with metric `g`.
    fn psi(&self, metric: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<PySuper> {
        let ctx = gcx_core::GradedContext::new(0, to_matrix(metric)?).map_err(err)?;
        let data = derived::CubicHamiltonianData::from_structure_constants(&ctx, self.0.constants()).map_err(err)?;
        Ok(PySuper(derived::build_psi(&data)))
    }
}

impl PyLeibniz {
    fn tensor(&self, rows: Vec<Vec<Bound<'_, PyAny>>>) -> PyResult<TensorEndo> {
        TensorEndo::new(to_matrix(rows)?).map_err(err)
    }
}

/// `Σ ξ^i p_i` on the hyperbolic chart of `TR^n ⊕ T*R^n`.
#[pyfunction]
fn canonical_psi(n: usize) -> PySuper {
    PySuper(derived::canonical_psi(n))
}

/// `{Ψ, Ψ} = 0`.
#[pyfunction]
fn homological_check(psi: &PySuper) -> PyResult<bool> {
    derived::homological_check(&psi.0).map_err(err)
}

/// `{{x, Ψ}, y}`.
#[pyfunction]
fn derived_bracket(psi: &PySuper, x: &PySuper, y: &PySuper) -> PyResult<PySuper> {
    derived::derived_bracket(&psi.0, &x.0, &y.0).map(PySuper).map_err(err)
}

/// Classifies a constant `2n × 2n` tensor on `TR^n ⊕ T*R^n`, written in
/// the basis `∂_1..∂_n, dx^1..dx^n`.
#[pyfunction]
#[pyo3(signature = (tensor, degree_bound = 2))]
fn classify_courant_tensor_py<'py>(
    py: Python<'py>,
    tensor: Vec<Vec<Bound<'py, PyAny>>>,
    degree_bound: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let tensor = GenEndomorphism::from_constant(&to_matrix(tensor)?).map_err(err)?;
    let result = classify_courant_tensor(&tensor, degree_bound);
    let out = PyDict::new(py);
    out.set_item("kind", result.kind.to_string())?;
    out.set_item("lambda", opt_fraction(py, &result.lambda)?)?;
    out.set_item("gamma", opt_fraction(py, &result.gamma)?)?;
    out.set_item("shifted_square", opt_fraction(py, &result.shifted_square)?)?;
    Ok(out)
}

/// Dimension of the commutant solution space; `stage` is `"left-multiplication"`,
/// `"with-square"` or `"all-left-factors"`.
#[pyfunction]
#[pyo3(signature = (n, coeff_degree, stage = "with-square", generating_degree = 2))]
fn commutant_dimension(n: usize, coeff_degree: u32, stage: &str, generating_degree: u32) -> PyResult<usize> {
    let stage = match stage {
        "left-multiplication" => CommutantStage::LeftMultiplication,
        "with-square" => CommutantStage::WithSquare,
        "all-left-factors" => CommutantStage::AllLeftFactors,
        other => return Err(err(format!("unknown stage {other:?}"))),
    };
    Ok(commutant_solve(n, coeff_degree, generating_degree, stage).dimension())
}

/// Runs a CLI subcommand on a JSON document and returns `(report, exit_code)`.
#[pyfunction]
#[pyo3(signature = (subcommand, document, format = "json", seed = None, trials = None, degree_bound = None))]
fn run(
    subcommand: &str,
    document: &str,
    format: &str,
    seed: Option<u64>,
    trials: Option<usize>,
    degree_bound: Option<u32>,
) -> PyResult<(String, i32)> {
    let sub = Subcommand::from_name(subcommand).ok_or_else(|| err(format!("unknown subcommand {subcommand:?}")))?;
    let format = match format {
        "json" => Format::Json,
        "text" => Format::Text,
        other => return Err(err(format!("unknown format {other:?}"))),
    };
    let overrides = Overrides { degree_bound, seed, trials, timing: false };
    Ok(execute(sub, document.as_bytes(), format, &overrides))
}

#[pymodule]
fn gcx(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyContext>()?;
    m.add_class::<PySuper>()?;
    m.add_class::<PyLeibniz>()?;
    m.add_function(wrap_pyfunction!(canonical_psi, m)?)?;
    m.add_function(wrap_pyfunction!(homological_check, m)?)?;
    m.add_function(wrap_pyfunction!(derived_bracket, m)?)?;
    m.add("classify_courant_tensor", wrap_pyfunction!(classify_courant_tensor_py, m)?)?;
    m.add_function(wrap_pyfunction!(commutant_dimension, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    Ok(())
}
