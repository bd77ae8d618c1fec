//! Python bindings: connections, curvature fields, the Hodge star, duality
//! residuals, the solver and field files.

use num_complex::Complex64;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sdym_core::cochain::Field;
use sdym_core::curvature::{self, PlaneGenerator};
use sdym_core::duality::{self, TheoremVerdict};
use sdym_core::io::{self, FieldFile, FormatError};
use sdym_core::solver::{self, Method, SolveConfig};
use sdym_core::{
    AlgebraElement, AlgebraKind, Axis, Cochain, ConnectionField, CurvatureField, DualityProblem, LatticeIndex, Metric,
    Plane, Window,
};

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn parse<T: std::str::FromStr>(s: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    s.parse().map_err(value_err)
}

fn window(dims: [usize; 4], boundary: &str) -> PyResult<Window> {
    if dims.contains(&0) {
        return Err(PyValueError::new_err("window extents must be positive"));
    }
    Ok(Window::new(dims, parse(boundary)?))
}

fn problem(metric: &str, dual: &str) -> PyResult<DualityProblem> {
    Ok(DualityProblem::new(parse(metric)?, parse(dual)?))
}

fn plane(name: &str) -> PyResult<Plane> {
    Plane::ALL
        .into_iter()
        .find(|p| p.to_string() == name)
        .ok_or_else(|| PyValueError::new_err(format!("unknown plane '{name}', expected one of 12 13 14 23 24 34")))
}

fn matrix(x: &AlgebraElement) -> [[Complex64; 2]; 2] {
    x.entries
}

fn element(m: [[Complex64; 2]; 2]) -> AlgebraElement {
    AlgebraElement::new(m)
}

/// A connection `A`: one 2×2 matrix per site and axis.
#[pyclass(name = "ConnectionField", module = "sdym", frozen)]
struct PyConnection(ConnectionField);

#[pymethods]
impl PyConnection {
    #[staticmethod]
    #[pyo3(signature = (dims, boundary = "periodic", algebra = "su2"))]
    fn zero(dims: [usize; 4], boundary: &str, algebra: &str) -> PyResult<Self> {
        Ok(Self(ConnectionField::zero(window(dims, boundary)?, parse(algebra)?)))
    }

    #[staticmethod]
    #[pyo3(signature = (dims, boundary = "periodic", algebra = "su2", seed = 0, scale = 1.0))]
    fn random(dims: [usize; 4], boundary: &str, algebra: &str, seed: u64, scale: f64) -> PyResult<Self> {
        Ok(Self(ConnectionField::random(window(dims, boundary)?, parse(algebra)?, seed, scale)))
    }

    /// `A = I - g_{τ_j k} g_k^{-1}` for a random gauge field `g`.
    #[staticmethod]
    #[pyo3(signature = (dims, boundary = "periodic", group = "su2", seed = 0, scale = 1.0))]
    fn pure_gauge(dims: [usize; 4], boundary: &str, group: &str, seed: u64, scale: f64) -> PyResult<Self> {
        let g = sdym_core::GaugeField::random(window(dims, boundary)?, parse(group)?, seed, scale);
        Ok(Self(curvature::pure_gauge(&g).map_err(value_err)?))
    }

    #[getter]
    fn dims(&self) -> [usize; 4] {
        self.0.window().dims()
    }

    #[getter]
    fn boundary(&self) -> &'static str {
        self.0.window().boundary().as_str()
    }

    #[getter]
    fn algebra(&self) -> &'static str {
        self.0.algebra().as_str()
    }

    /// `A_k^axis` as a nested list; zero outside a zero-boundary window.
    fn get(&self, site: [i64; 4], axis: usize) -> PyResult<[[Complex64; 2]; 2]> {
        let axis = Axis::new(axis).map_err(value_err)?;
        Ok(matrix(&self.0.get(LatticeIndex(site), axis)))
    }

    fn set(&self, site: [i64; 4], axis: usize, value: [[Complex64; 2]; 2]) -> PyResult<Self> {
        let axis = Axis::new(axis).map_err(value_err)?;
        let mut out = self.0.clone();
        if !out.set(LatticeIndex(site), axis, element(value)) {
            return Err(PyValueError::new_err(format!("site {site:?} lies outside the window")));
        }
        Ok(Self(out))
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn max_abs_diff(&self, other: &PyConnection) -> PyResult<f64> {
        self.0.max_abs_diff(&other.0).map_err(value_err)
    }

    fn __add__(&self, other: &PyConnection) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(value_err)
    }

    fn __sub__(&self, other: &PyConnection) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(value_err)
    }

    fn __mul__(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    fn __rmul__(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    fn __eq__(&self, other: &PyConnection) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("ConnectionField({}, algebra={})", self.0.window(), self.0.algebra())
    }
}

/// A curvature field `F`: one 2×2 matrix per site and plane.
#[pyclass(name = "CurvatureField", module = "sdym", frozen)]
struct PyCurvature(CurvatureField);

#[pymethods]
impl PyCurvature {
    #[staticmethod]
    #[pyo3(signature = (dims, boundary = "periodic", algebra = "su2"))]
    fn zero(dims: [usize; 4], boundary: &str, algebra: &str) -> PyResult<Self> {
        Ok(Self(CurvatureField::zero(window(dims, boundary)?, parse(algebra)?)))
    }

    #[staticmethod]
    #[pyo3(signature = (dims, boundary = "periodic", algebra = "su2", seed = 0, scale = 1.0))]
    fn random(dims: [usize; 4], boundary: &str, algebra: &str, seed: u64, scale: f64) -> PyResult<Self> {
        Ok(Self(CurvatureField::random(window(dims, boundary)?, parse(algebra)?, seed, scale)))
    }

    #[staticmethod]
    #[pyo3(signature = (dims, site, plane, value, boundary = "periodic"))]
    fn impulse(
        dims: [usize; 4],
        site: [i64; 4],
        plane: &str,
        value: [[Complex64; 2]; 2],
        boundary: &str,
    ) -> PyResult<Self> {
        let p = self::plane(plane)?;
        Ok(Self(CurvatureField::impulse(
            window(dims, boundary)?,
            AlgebraKind::Gl2,
            LatticeIndex(site),
            p,
            element(value),
        )))
    }

    /// An exact solution of the duality equations with planes 12 and 34 only.
    #[staticmethod]
    #[pyo3(signature = (dims, metric, dual, seed = 0, scale = 1.0))]
    fn synthetic(dims: [usize; 4], metric: &str, dual: &str, seed: u64, scale: f64) -> PyResult<Self> {
        let p = problem(metric, dual)?;
        let kind = match p.metric {
            Metric::Euclid => AlgebraKind::Su2,
            Metric::Mink => AlgebraKind::Sl2c,
        };
        let gen = PlaneGenerator::Random { seed, kind, scale };
        curvature::synthetic_sd_curvature(&gen, window(dims, "periodic")?, p).map(Self).map_err(value_err)
    }

    #[getter]
    fn dims(&self) -> [usize; 4] {
        self.0.window().dims()
    }

    #[getter]
    fn boundary(&self) -> &'static str {
        self.0.window().boundary().as_str()
    }

    #[getter]
    fn algebra(&self) -> &'static str {
        self.0.algebra().as_str()
    }

    /// `F_k^plane` for a plane name such as `"12"`.
    fn get(&self, site: [i64; 4], plane: &str) -> PyResult<[[Complex64; 2]; 2]> {
        Ok(matrix(&self.0.get(LatticeIndex(site), self::plane(plane)?)))
    }

    fn norm(&self) -> f64 {
        self.0.norm()
    }

    fn max_abs(&self) -> f64 {
        self.0.max_abs()
    }

    fn max_abs_diff(&self, other: &PyCurvature) -> PyResult<f64> {
        self.0.max_abs_diff(&other.0).map_err(value_err)
    }

    fn diagonal_down_shift(&self) -> Self {
        Self(self.0.diagonal_down_shift())
    }

    fn __add__(&self, other: &PyCurvature) -> PyResult<Self> {
        self.0.add(&other.0).map(Self).map_err(value_err)
    }

    fn __sub__(&self, other: &PyCurvature) -> PyResult<Self> {
        self.0.sub(&other.0).map(Self).map_err(value_err)
    }

    fn __mul__(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    fn __rmul__(&self, s: f64) -> Self {
        Self(self.0.scale(s))
    }

    fn __neg__(&self) -> Self {
        Self(self.0.scale(-1.0))
    }

    fn __eq__(&self, other: &PyCurvature) -> bool {
        self.0 == other.0
    }

    fn __repr__(&self) -> String {
        format!("CurvatureField({}, algebra={})", self.0.window(), self.0.algebra())
    }
}

#[pyfunction]
fn curvature_of(a: &PyConnection) -> PyCurvature {
    PyCurvature(curvature::curvature(&a.0))
}

#[pyfunction]
fn star(f: &PyCurvature, metric: &str) -> PyResult<PyCurvature> {
    Ok(PyCurvature(sdym_core::hodge::star(&f.0, parse(metric)?)))
}

#[pyfunction]
fn double_star(f: &PyCurvature, metric: &str) -> PyResult<PyCurvature> {
    Ok(PyCurvature(sdym_core::hodge::double_star(&f.0, parse(metric)?)))
}

#[pyfunction]
fn residual(f: &PyCurvature, metric: &str, dual: &str) -> PyResult<PyCurvature> {
    Ok(PyCurvature(duality::residual(&f.0, problem(metric, dual)?)))
}

#[pyfunction]
fn residual_norm(f: &PyCurvature, metric: &str, dual: &str) -> PyResult<f64> {
    Ok(duality::residual_norm(&f.0, problem(metric, dual)?))
}

#[pyfunction]
fn residual_componentwise(a: &PyConnection, metric: &str, dual: &str) -> PyResult<PyCurvature> {
    Ok(PyCurvature(duality::residual_componentwise(&a.0, problem(metric, dual)?)))
}

/// `(holds, max_violation)` for `F_k = F_{σk}` slotwise.
#[pyfunction]
fn check_diagonal_relation(f: &PyCurvature) -> (bool, f64) {
    let r = duality::check_diagonal_relation(&f.0);
    (r.holds, r.max_violation)
}

/// One of `consistent`, `violates_support`, `violates_duality`,
/// `nonzero_contradiction`.
#[pyfunction]
fn verify_triviality_theorem(f: &PyCurvature, bound: [i64; 4], metric: &str, dual: &str) -> PyResult<&'static str> {
    let v: TheoremVerdict =
        duality::verify_triviality_theorem(&f.0, bound, problem(metric, dual)?).map_err(value_err)?;
    Ok(v.as_str())
}

#[pyfunction]
fn objective(a: &PyConnection, metric: &str, dual: &str) -> PyResult<f64> {
    Ok(solver::objective(&a.0, problem(metric, dual)?))
}

/// `∂R/∂c` over the real coordinates of `A`.
#[pyfunction]
fn gradient(a: &PyConnection, metric: &str, dual: &str) -> PyResult<Vec<f64>> {
    Ok(solver::gradient(&a.0, problem(metric, dual)?).components)
}

#[pyfunction]
fn coordinates(a: &PyConnection) -> Vec<f64> {
    solver::coordinates(&a.0)
}

#[pyfunction]
fn from_coordinates(template: &PyConnection, coords: Vec<f64>) -> PyResult<PyConnection> {
    let expected = solver::coordinates(&template.0).len();
    if coords.len() != expected {
        return Err(PyValueError::new_err(format!("expected {expected} coordinates, got {}", coords.len())));
    }
    Ok(PyConnection(solver::from_coordinates(&template.0, &coords)))
}

/// Minimises the residual; returns the connection and a report dict.
#[pyfunction]
#[pyo3(signature = (a, metric, dual, max_iter = 10_000, tol = 1e-8, method = "gn", trace_every = 1))]
fn solve<'py>(
    py: Python<'py>,
    a: &PyConnection,
    metric: &str,
    dual: &str,
    max_iter: usize,
    tol: f64,
    method: &str,
    trace_every: usize,
) -> PyResult<(PyConnection, Bound<'py, PyDict>)> {
    let cfg = SolveConfig {
        max_iter,
        tol,
        trace_every,
        method: parse::<Method>(method)?,
        ..SolveConfig::new(problem(metric, dual)?)
    };
    let (out, rep) = py.detach(|| solver::solve(&a.0, &cfg)).map_err(value_err)?;
    let report = PyDict::new(py);
    report.set_item("iterations", rep.iterations)?;
    report.set_item("final_residual", rep.final_residual)?;
    report.set_item("converged", rep.converged)?;
    report.set_item("stop", format!("{:?}", rep.stop))?;
    let trace: Vec<(usize, f64, f64)> = rep.residual_trace.iter().map(|t| (t.iteration, t.residual, t.step)).collect();
    report.set_item("trace", trace)?;
    Ok((PyConnection(out), report))
}

fn format_err(e: FormatError) -> PyErr {
    match e {
        FormatError::Io { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

/// Writes a connection or curvature field to a JSON field file.
#[pyfunction]
#[pyo3(signature = (field, path, metric = None))]
fn save(field: &Bound<'_, PyAny>, path: &str, metric: Option<&str>) -> PyResult<()> {
    let metric: Option<Metric> = metric.map(parse).transpose()?;
    let field = if let Ok(a) = field.cast::<PyConnection>() {
        Field::Connection(a.get().0.clone())
    } else if let Ok(f) = field.cast::<PyCurvature>() {
        Field::Curvature(f.get().0.clone())
    } else {
        return Err(PyValueError::new_err("expected a ConnectionField or CurvatureField"));
    };
    io::save(&FieldFile::new(field, metric), path).map_err(format_err)
}

/// Reads a rank-1 or rank-2 field file.
#[pyfunction]
fn load(py: Python<'_>, path: &str) -> PyResult<Py<PyAny>> {
    let file = io::load(path).map_err(format_err)?;
    match file.field {
        Field::Connection(a) => Ok(Py::new(py, PyConnection(a))?.into_any()),
        Field::Curvature(f) => Ok(Py::new(py, PyCurvature(f))?.into_any()),
        Field::Gauge(_) => Err(PyValueError::new_err("rank-0 files are not exposed to Python")),
    }
}

/// `printf("%.17g", x)`.
#[pyfunction]
fn format_g17(x: f64) -> String {
    sdym_core::cli::format_g17(x)
}

#[pymodule]
fn sdym(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyConnection>()?;
    m.add_class::<PyCurvature>()?;
    m.add_function(wrap_pyfunction!(curvature_of, m)?)?;
    m.add("curvature", m.getattr("curvature_of")?)?;
    m.add_function(wrap_pyfunction!(star, m)?)?;
    m.add_function(wrap_pyfunction!(double_star, m)?)?;
    m.add_function(wrap_pyfunction!(residual, m)?)?;
    m.add_function(wrap_pyfunction!(residual_norm, m)?)?;
    m.add_function(wrap_pyfunction!(residual_componentwise, m)?)?;
    m.add_function(wrap_pyfunction!(check_diagonal_relation, m)?)?;
    m.add_function(wrap_pyfunction!(verify_triviality_theorem, m)?)?;
    m.add_function(wrap_pyfunction!(objective, m)?)?;
    m.add_function(wrap_pyfunction!(gradient, m)?)?;
    m.add_function(wrap_pyfunction!(coordinates, m)?)?;
    m.add_function(wrap_pyfunction!(from_coordinates, m)?)?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(save, m)?)?;
    m.add_function(wrap_pyfunction!(load, m)?)?;
    m.add_function(wrap_pyfunction!(format_g17, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
