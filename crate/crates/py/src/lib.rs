//! Python bindings: supermatrices, the Γ function of Ω, the identity checks,
//! the oscillator and the Borel chain.

use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyDict, PyList, PyString};
use serde_json::Value;

use superbos::domains::{FlatDomain, FlatMethod, OmegaDomain};
use superbos::report::VerificationReport;
use superbos::sfunc::StructuredFunction;
use superbos::smat::{sample, MultiIndex};
use superbos::{osc, properties, riesz, weights, Error};

fn err(e: Error) -> PyErr {
    match e {
        Error::InvalidArgument(_) | Error::Hypothesis(_) | Error::Divergent(_) | Error::Shape(_) | Error::Parity(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn to_py<'py>(py: Python<'py>, v: &Value) -> PyResult<Bound<'py, PyAny>> {
    Ok(match v {
        Value::Null => py.None().into_bound(py),
        Value::Bool(b) => b.into_pyobject(py)?.to_owned().into_any(),
        Value::Number(n) => match n.as_i64() {
            Some(i) => i.into_pyobject(py)?.into_any(),
            None => n.as_f64().unwrap_or(f64::NAN).into_pyobject(py)?.into_any(),
        },
        Value::String(s) => PyString::new(py, s).into_any(),
        Value::Array(a) => {
            let list = PyList::empty(py);
            for x in a {
                list.append(to_py(py, x)?)?;
            }
            list.into_any()
        }
        Value::Object(o) => {
            let dict = PyDict::new(py);
            for (k, x) in o {
                dict.set_item(k, to_py(py, x)?)?;
            }
            dict.into_any()
        }
    })
}

fn json_to_py<'py, T: serde::Serialize>(py: Python<'py>, t: &T) -> PyResult<Bound<'py, PyAny>> {
    let v = serde_json::to_value(t).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    to_py(py, &v)
}

/// One identity check.
#[pyclass(name = "Report", frozen, skip_from_py_object)]
#[derive(Clone)]
pub struct PyReport(VerificationReport);

#[pymethods]
impl PyReport {
    #[getter]
    fn identity(&self) -> &str {
        &self.0.identity
    }
    #[getter]
    fn p(&self) -> usize {
        self.0.p
    }
    #[getter]
    fn q(&self) -> usize {
        self.0.q
    }
    #[getter]
    fn n(&self) -> i64 {
        self.0.n
    }
    #[getter]
    fn m(&self) -> Option<Vec<i64>> {
        self.0.m.clone()
    }
    #[getter]
    fn lhs(&self) -> Complex64 {
        self.0.lhs
    }
    #[getter]
    fn rhs(&self) -> Complex64 {
        self.0.rhs
    }
    #[getter]
    fn reference(&self) -> Option<Complex64> {
        self.0.reference
    }
    #[getter]
    fn rel_err(&self) -> f64 {
        self.0.rel_err
    }
    #[getter]
    fn abs_err(&self) -> f64 {
        self.0.abs_err
    }
    #[getter]
    fn passed(&self) -> bool {
        self.0.pass
    }
    #[getter]
    fn method(&self) -> &str {
        &self.0.method
    }
    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.0)
    }
    fn __repr__(&self) -> String {
        self.0.line()
    }
}

/// Even `(p|q)` supermatrix with complex Grassmann entries.
#[pyclass(name = "SuperMatrix", frozen, from_py_object)]
#[derive(Clone)]
pub struct PySuperMatrix(superbos::sfunc::SuperPoint);

#[pymethods]
impl PySuperMatrix {
    /// Numeric supermatrix from row-major entries (odd blocks must vanish
    /// when `generators = 0`).
    #[new]
    #[pyo3(signature = (p, q, entries, generators = 0))]
    fn new(p: usize, q: usize, entries: Vec<Complex64>, generators: usize) -> PyResult<Self> {
        superbos::smat::SuperMatrix::from_numeric(p, q, generators, &entries).map(Self).map_err(err)
    }

    /// Random even supermatrix with body `shift·1 + noise`, seeded.
    #[staticmethod]
    #[pyo3(signature = (p, q, generators, seed, shift = 2.0, scale = 0.4))]
    fn random(p: usize, q: usize, generators: usize, seed: u64, shift: f64, scale: f64) -> Self {
        use rand::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
        Self(sample::even_supermatrix(&mut rng, p, q, generators, shift, scale))
    }

    #[getter]
    fn shape(&self) -> PyResult<(usize, usize)> {
        self.0.square_type().map_err(err)
    }

    #[getter]
    fn generators(&self) -> usize {
        self.0.generators()
    }

    fn __matmul__(&self, other: &Self) -> PyResult<Self> {
        self.0.mul(&other.0).map(Self).map_err(err)
    }

    fn inverse(&self) -> PyResult<Self> {
        self.0.inverse().map(Self).map_err(err)
    }

    fn cayley(&self) -> PyResult<Self> {
        self.0.cayley().map(Self).map_err(err)
    }

    /// Body of the Berezinian.
    fn ber(&self) -> PyResult<Complex64> {
        Ok(self.0.berezinian().map_err(err)?.body())
    }

    /// Full Berezinian as `{mask: coefficient}` over the Grassmann basis.
    fn ber_terms(&self) -> PyResult<Vec<(u32, Complex64)>> {
        Ok(self.0.berezinian().map_err(err)?.terms().to_vec())
    }

    fn supertrace(&self) -> PyResult<Complex64> {
        Ok(self.0.supertrace().map_err(err)?.body())
    }

    fn delta_m(&self, m: Vec<i64>) -> PyResult<Complex64> {
        Ok(self.0.delta_m(&MultiIndex(m)).map_err(err)?.body())
    }

    /// Body matrix, row-major.
    fn body(&self) -> Vec<Complex64> {
        self.0.matrix().body()
    }

    fn max_abs_diff(&self, other: &Self) -> f64 {
        self.0.max_abs_diff(&other.0)
    }
}

/// `(value, is_pole)` of the Gindikin Γ of Ω.
#[pyfunction]
fn gamma_omega(m: Vec<i64>, p: usize, q: usize) -> PyResult<(f64, bool)> {
    let g = riesz::gamma_omega(&MultiIndex(m), p, q).map_err(err)?;
    Ok((g.value.re, g.is_pole))
}

/// The alternative odd-entry product, for comparison.
#[pyfunction]
fn gamma_omega_as_printed(m: Vec<i64>, p: usize, q: usize) -> PyResult<(f64, bool)> {
    let g = riesz::gamma_omega_as_printed(&MultiIndex(m), p, q).map_err(err)?;
    Ok((g.value.re, g.is_pole))
}

#[pyfunction]
fn pochhammer(n: i64, m: Vec<i64>, p: usize, q: usize) -> PyResult<Complex64> {
    riesz::pochhammer(n, &MultiIndex(m), p, q).map_err(err)
}

fn omega(p: usize, q: usize, method: &str, samples: usize, seed: u64) -> PyResult<OmegaDomain> {
    match method {
        "quad" => Ok(OmegaDomain::quadrature(p, q)),
        "mc" => Ok(OmegaDomain::monte_carlo(p, q, samples, seed)),
        other => Err(PyValueError::new_err(format!("unknown method {other:?}"))),
    }
}

/// Flat integral vs. Ω integral vs. `√π^{np}(n)_m` for `Δ_m e^{−str}`.
#[pyfunction]
#[pyo3(signature = (p, q, n, m, method = "quad", samples = 200_000, seed = 0, tol = 1e-6))]
fn check_superbosonisation(p: usize, q: usize, n: i64, m: Vec<i64>, method: &str, samples: usize, seed: u64, tol: f64) -> PyResult<PyReport> {
    if n < 0 {
        return Err(PyValueError::new_err("n must be non-negative"));
    }
    let f = StructuredFunction::conical(p, q, MultiIndex(m), 1.0).map_err(err)?;
    let mut flat = FlatDomain::quadrature(p, q, n as usize);
    if method == "mc" {
        flat = flat.with_method(FlatMethod::MonteCarlo { samples, seed });
    }
    let dom = omega(p, q, method, samples, seed)?;
    riesz::superbosonise_check(&f, n, &flat, &dom, tol).map(PyReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p, q, m, method = "quad", samples = 200_000, seed = 0, tol = 1e-6))]
fn check_gamma(p: usize, q: usize, m: Vec<i64>, method: &str, samples: usize, seed: u64, tol: f64) -> PyResult<PyReport> {
    let dom = omega(p, q, method, samples, seed)?;
    riesz::gamma_check(&MultiIndex(m), p, q, &dom, tol).map(PyReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p, q, m, x, tol = 1e-6))]
fn check_laplace(p: usize, q: usize, m: Vec<i64>, x: Vec<f64>, tol: f64) -> PyResult<PyReport> {
    riesz::laplace_check(&MultiIndex(m), &x, p, q, &OmegaDomain::quadrature(p, q), tol).map(PyReport).map_err(err)
}

#[pyfunction]
#[pyo3(signature = (p, q, n, m, t, weighted = true, tol = 1e-6))]
fn check_weighted_laplace(p: usize, q: usize, n: i64, m: Vec<i64>, t: f64, weighted: bool, tol: f64) -> PyResult<PyReport> {
    riesz::weighted_lt_check(p, q, n, &MultiIndex(m), t, &OmegaDomain::quadrature(p, q), weighted, tol)
        .map(PyReport)
        .map_err(err)
}

/// Exact bracket verification of the oscillator realisation.
#[pyfunction]
#[pyo3(signature = (p, q, n, degree = 3))]
fn commutator_check<'py>(py: Python<'py>, p: usize, q: usize, n: usize, degree: usize) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &osc::commutator_check(p, q, n, degree).map_err(err)?)
}

/// `λ` for the adapted Borel, as `{"delta": [...], "eps": [...]}` of fraction strings.
#[pyfunction]
fn highest_weight<'py>(py: Python<'py>, p: usize, q: usize, n: usize) -> PyResult<Bound<'py, PyAny>> {
    weight_dict(py, &osc::highest_weight(p, q, n))
}

/// Highest weight for the standard Borel, found from singular invariants.
#[pyfunction]
#[pyo3(signature = (p, q, n, max_degree = 4))]
fn standard_borel_highest_weight<'py>(py: Python<'py>, p: usize, q: usize, n: usize, max_degree: usize) -> PyResult<Bound<'py, PyAny>> {
    let (w, _) = osc::standard_borel_highest_weight(p, q, n, max_degree).map_err(err)?;
    weight_dict(py, &w)
}

fn weight_dict<'py>(py: Python<'py>, w: &weights::Weight) -> PyResult<Bound<'py, PyAny>> {
    let d = PyDict::new(py);
    d.set_item("delta", w.delta.iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
    d.set_item("eps", w.eps.iter().map(|x| x.to_string()).collect::<Vec<_>>())?;
    Ok(d.into_any())
}

/// Odd-reflection chain, diagrams and weight bookkeeping.
#[pyfunction]
#[pyo3(signature = (p, q, n = None))]
fn borel_chain<'py>(py: Python<'py>, p: usize, q: usize, n: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let chain = weights::borel_chain(p, q, n);
    let out = json_to_py(py, &chain)?;
    out.set_item("ascii", chain.diagram.ascii())?;
    Ok(out)
}

/// Seeded algebraic property suites.
#[pyfunction]
#[pyo3(signature = (instances = 128, seed = 0, tol = 1e-10))]
fn property_suites<'py>(py: Python<'py>, instances: usize, seed: u64, tol: f64) -> PyResult<Bound<'py, PyAny>> {
    json_to_py(py, &properties::run_all(instances, seed, tol).map_err(err)?)
}

#[pymodule]
fn superbos_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyReport>()?;
    m.add_class::<PySuperMatrix>()?;
    m.add_function(wrap_pyfunction!(gamma_omega, m)?)?;
    m.add_function(wrap_pyfunction!(gamma_omega_as_printed, m)?)?;
    m.add_function(wrap_pyfunction!(pochhammer, m)?)?;
    m.add_function(wrap_pyfunction!(check_superbosonisation, m)?)?;
    m.add_function(wrap_pyfunction!(check_gamma, m)?)?;
    m.add_function(wrap_pyfunction!(check_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(check_weighted_laplace, m)?)?;
    m.add_function(wrap_pyfunction!(commutator_check, m)?)?;
    m.add_function(wrap_pyfunction!(highest_weight, m)?)?;
    m.add_function(wrap_pyfunction!(standard_borel_highest_weight, m)?)?;
    m.add_function(wrap_pyfunction!(borel_chain, m)?)?;
    m.add_function(wrap_pyfunction!(property_suites, m)?)?;
    Ok(())
}
