//! Python bindings: varieties, presentations, predimension, axiom emission
//! and session runs. Structured results are returned as plain dicts.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;
use serde::Serialize;

use expfield::arith::Rational;
use expfield::axiomgen;
use expfield::exppoly::{exp_derivative, ExpPoly};
use expfield::geometry::{self, GVariety};
use expfield::presentation::{self, EFieldPresentation, ExtensionDatum, SubPresentation};
use expfield::session::{Overrides, Session};
use expfield::{Bounds, Error};

fn py_err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dict<'py, T: Serialize>(py: Python<'py>, x: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(x).map_err(|e| PyValueError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

#[pyclass(name = "Variety", module = "pyexpfield", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyVariety(GVariety);

#[pymethods]
impl PyVariety {
    /// `Variety(n, ["y1 - x1"], params=[])`: a subvariety of `Ga^n x Gm^n`.
    #[new]
    #[pyo3(signature = (n, equations, params = Vec::new()))]
    fn new(n: usize, equations: Vec<String>, params: Vec<String>) -> PyResult<Self> {
        let eqs: Vec<&str> = equations.iter().map(String::as_str).collect();
        GVariety::parse(n, &params, &eqs).map(PyVariety).map_err(py_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    #[getter]
    fn params(&self) -> Vec<String> {
        self.0.params().to_vec()
    }

    fn dimension(&self) -> usize {
        self.0.dimension()
    }

    /// Reduced Gröbner basis of the ideal, as strings.
    fn ideal(&self) -> PyResult<Vec<String>> {
        let gb = self.0.ideal_basis().map_err(py_err)?;
        Ok(gb.generators().iter().map(ToString::to_string).collect())
    }

    fn additive_freeness<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &geometry::is_additively_free(&self.0).map_err(py_err)?)
    }

    #[pyo3(signature = (bound = 5))]
    fn multiplicative_freeness<'py>(&self, py: Python<'py>, bound: u32) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &geometry::is_multiplicatively_free_up_to(&self.0, bound).map_err(py_err)?)
    }

    #[pyo3(signature = (bound = 3))]
    fn rotundity<'py>(&self, py: Python<'py>, bound: u32) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &geometry::is_rotund_up_to(&self.0, bound).map_err(py_err)?)
    }

    fn same_ideal(&self, other: &PyVariety) -> bool {
        self.0.same_ideal(&other.0)
    }

    fn __repr__(&self) -> String {
        let gens: Vec<String> = self.0.generators().iter().map(ToString::to_string).collect();
        format!("Variety(n={}, [{}])", self.0.n(), gens.join(", "))
    }
}

#[pyclass(name = "EField", module = "pyexpfield", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyEField(EFieldPresentation);

impl PyEField {
    fn rows(&self, elements: &[String]) -> PyResult<Vec<Vec<Rational>>> {
        elements.iter().map(|e| self.0.parse_combination(e).map_err(py_err)).collect()
    }

    fn sub(&self, elements: &[String]) -> PyResult<SubPresentation> {
        SubPresentation::from_rows(self.0.n(), &self.rows(elements)?).map_err(py_err)
    }
}

#[pymethods]
impl PyEField {
    /// `EField(["b1", "b2"], kernel=None, relations=["exp(b2) = exp(b1)^2"])`.
    #[new]
    #[pyo3(signature = (gens, kernel = None, relations = Vec::new()))]
    fn new(gens: Vec<String>, kernel: Option<String>, relations: Vec<String>) -> PyResult<Self> {
        let rels: Vec<&str> = relations.iter().map(String::as_str).collect();
        EFieldPresentation::parse(&gens, kernel.as_deref(), &rels).map(PyEField).map_err(py_err)
    }

    #[getter]
    fn basis(&self) -> Vec<String> {
        self.0.basis().to_vec()
    }

    #[getter]
    fn kernel(&self) -> Option<String> {
        self.0.kernel().map(str::to_string)
    }

    fn relations(&self) -> Vec<String> {
        self.0.relations()
    }

    fn td(&self) -> usize {
        self.0.td()
    }

    fn ldim(&self) -> usize {
        self.0.ldim()
    }

    /// `δ` of the elements over the span of `over`.
    #[pyo3(signature = (elements, over = Vec::new()))]
    fn delta<'py>(&self, py: Python<'py>, elements: Vec<String>, over: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
        let d = presentation::delta(&self.0, &self.rows(&elements)?, &self.sub(&over)?).map_err(py_err)?;
        to_dict(py, &d)
    }

    fn schanuel<'py>(&self, py: Python<'py>, elements: Vec<String>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &presentation::schanuel_check(&self.0, &self.rows(&elements)?).map_err(py_err)?)
    }

    #[pyo3(signature = (base, bound = 3))]
    fn strong<'py>(&self, py: Python<'py>, base: Vec<String>, bound: u32) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &presentation::is_strong_up_to(&self.0, &self.sub(&base)?, bound).map_err(py_err)?)
    }

    #[pyo3(signature = (start, bound = 3))]
    fn hull<'py>(&self, py: Python<'py>, start: Vec<String>, bound: u32) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &presentation::hull_up_to(&self.0, &self.sub(&start)?, bound).map_err(py_err)?)
    }

    /// Adjoins a generic point of `variety` under `symbols`; returns the new
    /// presentation and the extension report.
    fn extend<'py>(&self, py: Python<'py>, variety: &PyVariety, symbols: Vec<String>) -> PyResult<(PyEField, Bound<'py, PyAny>)> {
        let datum = ExtensionDatum {
            base: self.0.clone(),
            variety: variety.0.clone(),
            symbols,
        };
        let e = presentation::extend_by_variety(&datum, &Bounds::default()).map_err(py_err)?;
        let report = to_dict(py, &e)?;
        Ok((PyEField(e.presentation), report))
    }

    fn __repr__(&self) -> String {
        format!("EField(basis={:?}, relations={:?})", self.0.basis(), self.0.relations())
    }
}

/// The configuration `exp(c_i) = c_{i+1}`, `exp(c_N) = c_0`.
#[pyfunction]
fn iterated_exp_config(depth: usize) -> PyResult<(PyEField, PyVariety)> {
    let (f, v) = presentation::iterated_exp_config(depth).map_err(py_err)?;
    Ok((PyEField(f), PyVariety(v)))
}

/// Canonical rendering of a formula.
#[pyfunction]
fn parse_formula(text: &str) -> PyResult<String> {
    axiomgen::parse(text).map(|f| f.render()).map_err(py_err)
}

/// The syntax tree of a formula as nested dicts.
#[pyfunction]
fn formula_ast<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    to_dict(py, &axiomgen::parse(text).map_err(py_err)?)
}

#[pyfunction]
fn schanuel_axiom(variety: &PyVariety) -> PyResult<String> {
    axiomgen::schanuel_axiom_instance(&variety.0).map(|f| f.render()).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (family, r = 0))]
fn seac_axiom(family: &PyVariety, r: usize) -> PyResult<String> {
    axiomgen::seac_axiom_instance(&family.0, r).map(|f| f.render()).map_err(py_err)
}

/// `∂f/∂x_i` for an exponential polynomial in `x1..xn`, `exp(x1)..exp(xn)`.
#[pyfunction]
#[pyo3(signature = (n, f, i, params = Vec::new()))]
fn derivative(n: usize, f: &str, i: usize, params: Vec<String>) -> PyResult<String> {
    let f = ExpPoly::parse(n, &params, f).map_err(py_err)?;
    exp_derivative(&f, i).map(|d| d.to_string()).map_err(py_err)
}

/// Parses and runs a session; returns the report as a dict.
#[pyfunction]
fn run_session<'py>(py: Python<'py>, source: &str) -> PyResult<Bound<'py, PyAny>> {
    let session = Session::parse(source).map_err(py_err)?;
    let report = session.run(&Overrides::default());
    let dict = to_dict(py, &report)?;
    dict.cast::<PyDict>()?.set_item("exit_code", report.exit_code())?;
    Ok(dict)
}

#[pymodule]
fn pyexpfield(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyVariety>()?;
    m.add_class::<PyEField>()?;
    m.add_function(wrap_pyfunction!(iterated_exp_config, m)?)?;
    m.add_function(wrap_pyfunction!(parse_formula, m)?)?;
    m.add_function(wrap_pyfunction!(formula_ast, m)?)?;
    m.add_function(wrap_pyfunction!(schanuel_axiom, m)?)?;
    m.add_function(wrap_pyfunction!(seac_axiom, m)?)?;
    m.add_function(wrap_pyfunction!(derivative, m)?)?;
    m.add_function(wrap_pyfunction!(run_session, m)?)?;
    Ok(())
}
