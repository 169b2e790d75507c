//! Python bindings: relations, kernels, the Hadamard walk and orthomodular
//! lattices. Scalars cross the boundary as strings (exact semirings) or as
//! Python numbers (`f64`, `c64`).

use std::sync::Arc;

use pyo3::exceptions::{PyKeyError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyComplex, PyDict};
use serde_json::{json, Value as Json};
use tamerel::omlattice::{validate_oml, OrthomodularLattice};
use tamerel::walk::{self, WalkState};
use tamerel::{io, rel, Carrier, ClassifyOptions, Error, Rel, Semiring, Value};

fn err(e: Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn semiring(tag: &str) -> PyResult<Semiring> {
    Semiring::from_tag(tag).ok_or_else(|| PyKeyError::new_err(format!("unknown semiring {tag:?}")))
}

fn rat_text(obj: &Bound<'_, PyAny>) -> PyResult<String> {
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(i.to_string());
    }
    obj.extract::<String>()
        .map_err(|_| PyValueError::new_err(format!("expected an int or a \"p/q\" string, got {obj}")))
}

fn qsqrt2_json(obj: &Bound<'_, PyAny>) -> PyResult<Json> {
    if let Ok((a, b)) = obj.extract::<(Bound<'_, PyAny>, Bound<'_, PyAny>)>() {
        return Ok(json!({"a": rat_text(&a)?, "b": rat_text(&b)?}));
    }
    Ok(json!({"a": rat_text(obj)?, "b": "0"}))
}

/// Python scalar → the JSON encoding the io layer parses. Exact scalars
/// are ints or `"p/q"` strings; `a + b√2` is the pair `(a, b)`, and a
/// `qisqrt2` value is `(re, im)` with each part a scalar or such a pair.
fn scalar_json(s: Semiring, obj: &Bound<'_, PyAny>) -> PyResult<Json> {
    Ok(match s {
        Semiring::Bool2 => json!(obj.extract::<bool>()?),
        Semiring::Nat | Semiring::Int | Semiring::Rat => json!(rat_text(obj)?),
        Semiring::F64 => json!(obj.extract::<f64>()?),
        Semiring::C64 => {
            let z = match obj.downcast::<PyComplex>() {
                Ok(c) => (c.real(), c.imag()),
                Err(_) => (obj.extract::<f64>()?, 0.0),
            };
            json!({"re": z.0, "im": z.1})
        }
        Semiring::QSqrt2 => qsqrt2_json(obj)?,
        Semiring::QISqrt2 => match obj.extract::<(Bound<'_, PyAny>, Bound<'_, PyAny>)>() {
            Ok((re, im)) => json!({"re": qsqrt2_json(&re)?, "im": qsqrt2_json(&im)?}),
            Err(_) => json!({"re": qsqrt2_json(obj)?, "im": {"a": "0", "b": "0"}}),
        },
    })
}

fn scalar_py(py: Python<'_>, v: &Value) -> PyObject {
    match v {
        Value::F64(x) => x.into_pyobject(py).unwrap().into_any().unbind(),
        Value::C64(z) => PyComplex::from_doubles(py, z.re, z.im).into_any().unbind(),
        Value::Bool(b) => b.into_pyobject(py).unwrap().to_owned().into_any().unbind(),
        v => v.to_string().into_pyobject(py).unwrap().into_any().unbind(),
    }
}

#[pyclass(name = "Relation", module = "tamerel", frozen)]
#[derive(Clone)]
struct PyRel(Rel);

#[pymethods]
impl PyRel {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::read_relation(text).map(PyRel).map_err(err)
    }

    /// A relation between `e0 … e(m−1)` and `e0 … e(n−1)` from a row-major
    /// matrix of scalars.
    #[staticmethod]
    #[pyo3(signature = (semiring_tag, rows, prefix = "e"))]
    fn from_matrix(semiring_tag: &str, rows: Vec<Vec<Bound<'_, PyAny>>>, prefix: &str) -> PyResult<Self> {
        let s = semiring(semiring_tag)?;
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Vec::with_capacity(rows.len());
        for (i, row) in rows.iter().enumerate() {
            if row.len() != cols {
                return Err(PyValueError::new_err("ragged matrix"));
            }
            let vals = row
                .iter()
                .enumerate()
                .map(|(j, x)| io::decode_value(s, &scalar_json(s, x)?, &format!("[{i}][{j}]")).map_err(err))
                .collect::<PyResult<Vec<_>>>()?;
            m.push(vals);
        }
        let dom = Carrier::numbered(prefix, rows.len());
        let cod = Carrier::numbered(prefix, cols);
        Rel::from_matrix(s, dom, cod, m).map(PyRel).map_err(err)
    }

    #[staticmethod]
    #[pyo3(signature = (semiring_tag, n, prefix = "e"))]
    fn identity(semiring_tag: &str, n: usize, prefix: &str) -> PyResult<Self> {
        Ok(PyRel(Rel::identity(semiring(semiring_tag)?, Carrier::numbered(prefix, n))))
    }

    /// The lazy Hadamard-walk step on `ℤ + ℤ`.
    #[staticmethod]
    #[pyo3(signature = (semiring_tag = "qisqrt2"))]
    fn hadamard_walk(semiring_tag: &str) -> PyResult<Self> {
        walk::hadamard_step(semiring(semiring_tag)?).map(PyRel).map_err(err)
    }

    fn to_json(&self) -> PyResult<String> {
        io::write_relation(&self.0).map_err(err)
    }

    #[getter]
    fn semiring(&self) -> &'static str {
        self.0.semiring().tag()
    }

    #[getter]
    fn dom(&self) -> String {
        self.0.dom().to_string()
    }

    #[getter]
    fn cod(&self) -> String {
        self.0.cod().to_string()
    }

    /// First `self`, then `other`.
    fn then(&self, other: &PyRel) -> PyResult<Self> {
        rel::compose(&self.0, &other.0).map(PyRel).map_err(err)
    }

    /// `self ∘ other`: first `other`, then `self`.
    fn compose(&self, other: &PyRel) -> PyResult<Self> {
        rel::compose(&other.0, &self.0).map(PyRel).map_err(err)
    }

    fn __matmul__(&self, other: &PyRel) -> PyResult<Self> {
        self.compose(other)
    }

    fn dagger(&self) -> Self {
        PyRel(self.0.dagger())
    }

    fn tensor(&self, other: &PyRel) -> PyResult<Self> {
        self.0.tensor(&other.0).map(PyRel).map_err(err)
    }

    fn oplus(&self, other: &PyRel) -> PyResult<Self> {
        self.0.oplus(&other.0).map(PyRel).map_err(err)
    }

    fn __add__(&self, other: &PyRel) -> PyResult<Self> {
        rel::hom_add(&self.0, &other.0).map(PyRel).map_err(err)
    }

    #[pyo3(signature = (other, tol = 0.0))]
    fn approx_eq(&self, other: &PyRel, tol: f64) -> PyResult<bool> {
        self.0.approx_eq(&other.0, tol).map_err(err)
    }

    fn __eq__(&self, other: &PyRel) -> PyResult<bool> {
        self.0.approx_eq(&other.0, 0.0).map_err(err)
    }

    /// Nonzero entries as `(x, y, value)` in canonical order.
    fn entries(&self, py: Python<'_>) -> PyResult<Vec<(String, String, PyObject)>> {
        Ok(self
            .0
            .entries()
            .map_err(err)?
            .iter()
            .map(|(x, y, v)| (x.to_string(), y.to_string(), scalar_py(py, v)))
            .collect())
    }

    /// Dagger-mono/epi, unitarity, self-adjointness and projection as a
    /// dict. `window = (lo, hi)` is needed for lazy relations on `ℤ + ℤ`.
    #[pyo3(signature = (tol = 1e-9, window = None))]
    fn classify<'py>(&self, py: Python<'py>, tol: f64, window: Option<(i64, i64)>) -> PyResult<Bound<'py, PyDict>> {
        let opts = ClassifyOptions {
            tol,
            window: window.map(|(lo, hi)| walk::int_sum_window(lo, hi)),
        };
        let c = self.0.classify(&opts).map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("dagger_mono", c.dagger_mono)?;
        d.set_item("dagger_epi", c.dagger_epi)?;
        d.set_item("unitary", c.unitary)?;
        d.set_item("self_adjoint", c.self_adjoint)?;
        d.set_item("projection", c.projection)?;
        d.set_item("partial", c.partial)?;
        Ok(d)
    }

    #[pyo3(signature = (tol = 1e-9))]
    fn is_unitary(&self, tol: f64) -> PyResult<bool> {
        self.0.is_unitary(tol).map_err(err)
    }

    fn __repr__(&self) -> String {
        let kind = if self.0.is_explicit() { "explicit" } else { "lazy" };
        format!("Relation({}: {} → {}, {kind})", self.0.semiring(), self.0.dom(), self.0.cod())
    }
}

/// The dagger kernel of `r` as a dict with `dimension`, `normalized` and
/// `map` (the kernel map `K → X`).
#[pyfunction]
#[pyo3(signature = (r, tol = 1e-10))]
fn kernel<'py>(py: Python<'py>, r: &PyRel, tol: f64) -> PyResult<Bound<'py, PyDict>> {
    let k = match tamerel::dagger_kernel(&r.0, tol) {
        Ok(k) => k,
        Err(Error::NormalizationFailed(k)) => *k,
        Err(e) => return Err(err(e)),
    };
    let d = PyDict::new(py);
    d.set_item("dimension", k.kernel_object.size().unwrap_or(0))?;
    d.set_item("adjoined", k.basis.len())?;
    d.set_item("normalized", k.normalized)?;
    d.set_item("map", PyRel(k.kernel_map).into_pyobject(py)?)?;
    Ok(d)
}

/// Position distribution after `steps` Hadamard-walk steps from `1·κ₁(0)`
/// (or the symmetric start), as `(position, probability)` pairs.
/// Probabilities are `p/q` strings over `qisqrt2` and floats over `c64`.
#[pyfunction]
#[pyo3(signature = (steps, semiring_tag = "qisqrt2", symmetric = false))]
fn walk_distribution(py: Python<'_>, steps: usize, semiring_tag: &str, symmetric: bool) -> PyResult<Vec<(i64, PyObject)>> {
    let s = semiring(semiring_tag)?;
    let init = if symmetric {
        WalkState::symmetric(s).map_err(err)?
    } else {
        WalkState::basis(s, 1, 0)
    };
    let st = walk::walk_run(&init, steps).map_err(err)?;
    Ok(st
        .position_distribution()
        .map_err(err)?
        .into_iter()
        .map(|(x, p)| {
            let o = match p {
                tamerel::Prob::Float(f) => f.into_pyobject(py).unwrap().into_any().unbind(),
                p => p.to_string().into_pyobject(py).unwrap().into_any().unbind(),
            };
            (x, o)
        })
        .collect())
}

#[pyclass(name = "Lattice", module = "tamerel", frozen)]
struct PyLattice(Arc<OrthomodularLattice>);

#[pymethods]
impl PyLattice {
    #[staticmethod]
    fn boolean(k: usize) -> Self {
        PyLattice(Arc::new(OrthomodularLattice::boolean(k)))
    }

    #[staticmethod]
    fn mo2() -> Self {
        PyLattice(Arc::new(OrthomodularLattice::mo2()))
    }

    #[staticmethod]
    fn o6() -> Self {
        PyLattice(Arc::new(OrthomodularLattice::o6()))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        io::read_lattice(text).map(|l| PyLattice(Arc::new(l))).map_err(err)
    }

    fn to_json(&self) -> String {
        io::write_lattice(&self.0)
    }

    fn names(&self) -> Vec<String> {
        self.0.names().to_vec()
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    /// Failed axioms as `(axiom, witness)` pairs; empty when orthomodular.
    fn validate(&self) -> Vec<(String, Vec<String>)> {
        validate_oml(&self.0)
            .failures
            .into_iter()
            .map(|f| (format!("{:?}", f.axiom), f.witness))
            .collect()
    }

    fn is_orthomodular(&self) -> bool {
        validate_oml(&self.0).is_valid()
    }
}

#[pymodule]
#[pyo3(name = "tamerel")]
fn tamerel_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyRel>()?;
    m.add_class::<PyLattice>()?;
    m.add_function(wrap_pyfunction!(kernel, m)?)?;
    m.add_function(wrap_pyfunction!(walk_distribution, m)?)?;
    m.add("SEMIRINGS", Semiring::ALL.iter().map(|s| s.tag()).collect::<Vec<_>>())?;
    Ok(())
}
