//! Python bindings: systems, factorizations, pole reports and checks.

use descfact::io::{to_json, SystemFile};
use descfact::postproc::{minimal_left_denominator, right_from_left};
use descfact::{
    DescriptorSystem, Domain, Error, GrcfOptions, LeftFactorRealization, LeftMethod, RegionSpec,
    StackedFactorRealization, Tolerances,
};
use nalgebra::DMatrix;
use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyRuntimeError, PyValueError};
use pyo3::prelude::*;

create_exception!(descfact, NoSolutionError, PyException);

fn py_err(err: Error) -> PyErr {
    match err {
        Error::NoSolution(_) => NoSolutionError::new_err(err.to_string()),
        Error::DimensionMismatch(_) | Error::NonFiniteEntry { .. } | Error::InvalidRegion(_) => {
            PyValueError::new_err(err.to_string())
        }
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

fn matrix(name: &str, rows: &[Vec<f64>], ncols: usize) -> PyResult<DMatrix<f64>> {
    if let Some(bad) = rows.iter().position(|r| r.len() != ncols) {
        return Err(PyValueError::new_err(format!(
            "{name}: row {bad} has {} entries, expected {ncols}",
            rows[bad].len()
        )));
    }
    Ok(DMatrix::from_fn(rows.len(), ncols, |i, j| rows[i][j]))
}

fn width(rows: &[Vec<f64>]) -> usize {
    rows.first().map_or(0, Vec::len)
}

fn rows(m: &DMatrix<f64>) -> Vec<Vec<f64>> {
    m.row_iter().map(|r| r.iter().copied().collect()).collect()
}

fn domain(name: &str) -> PyResult<Domain> {
    match name {
        "continuous" | "c" => Ok(Domain::Continuous),
        "discrete" | "d" => Ok(Domain::Discrete),
        other => Err(PyValueError::new_err(format!("unknown domain {other:?}"))),
    }
}

fn json_to_py(py: Python<'_>, text: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Descriptor system `E·dx = A·x + B·u, y = C·x + D·u` (or its discrete-time analogue).
#[pyclass(name = "DescriptorSystem", module = "descfact", frozen)]
struct PySystem {
    inner: DescriptorSystem,
}

#[pymethods]
impl PySystem {
    #[new]
    #[pyo3(signature = (a, b, c, d=None, e=None, domain="continuous"))]
    fn new(
        a: Vec<Vec<f64>>,
        b: Vec<Vec<f64>>,
        c: Vec<Vec<f64>>,
        d: Option<Vec<Vec<f64>>>,
        e: Option<Vec<Vec<f64>>>,
        domain: &str,
    ) -> PyResult<Self> {
        let n = a.len();
        let m = if n > 0 {
            width(&b)
        } else {
            d.as_deref().map_or(0, width)
        };
        let p = if c.is_empty() {
            d.as_ref().map_or(0, Vec::len)
        } else {
            c.len()
        };
        let a = matrix("A", &a, n)?;
        let b = if b.is_empty() {
            DMatrix::zeros(n, m)
        } else {
            matrix("B", &b, m)?
        };
        let c = if c.is_empty() {
            DMatrix::zeros(p, n)
        } else {
            matrix("C", &c, n)?
        };
        let d = match d {
            Some(d) => matrix("D", &d, m)?,
            None => DMatrix::zeros(p, m),
        };
        let e = e.map(|e| matrix("E", &e, n)).transpose()?;
        let inner = DescriptorSystem::new(a, e, b, c, d, self::domain(domain)?).map_err(py_err)?;
        Ok(Self { inner })
    }

    /// Reads the JSON system format used by the command-line tool.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: SystemFile =
            serde_json::from_str(text).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(Self {
            inner: file.to_system().map_err(py_err)?,
        })
    }

    fn to_json(&self) -> String {
        to_json(&SystemFile::from_system(&self.inner))
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn inputs(&self) -> usize {
        self.inner.inputs()
    }

    #[getter]
    fn outputs(&self) -> usize {
        self.inner.outputs()
    }

    #[getter]
    fn domain(&self) -> &'static str {
        self.inner.domain().as_str()
    }

    #[getter]
    fn a(&self) -> Vec<Vec<f64>> {
        rows(self.inner.a())
    }

    #[getter]
    fn e(&self) -> Vec<Vec<f64>> {
        rows(&self.inner.e())
    }

    #[getter]
    fn b(&self) -> Vec<Vec<f64>> {
        rows(self.inner.b())
    }

    #[getter]
    fn c(&self) -> Vec<Vec<f64>> {
        rows(self.inner.c())
    }

    #[getter]
    fn d(&self) -> Vec<Vec<f64>> {
        rows(self.inner.d())
    }

    /// Transfer matrix value at `s` (or `z`).
    fn __call__(&self, point: Complex64) -> PyResult<Vec<Vec<Complex64>>> {
        let v = descfact::eval_tfm(&self.inner, point).map_err(py_err)?;
        Ok(v.row_iter().map(|r| r.iter().copied().collect()).collect())
    }

    /// Poles with controllability/observability flags, as a dict.
    #[pyo3(signature = (alpha=None, inner=false))]
    fn poles(&self, py: Python<'_>, alpha: Option<f64>, inner: bool) -> PyResult<Py<PyAny>> {
        let region = if inner {
            RegionSpec::inner(self.inner.domain())
        } else {
            stabilize(self.inner.domain(), alpha)?
        };
        let report =
            descfact::pole_report(&self.inner, &region, &Tolerances::for_system(&self.inner))
                .map_err(py_err)?;
        json_to_py(py, &to_json(&report))
    }

    fn __repr__(&self) -> String {
        format!(
            "DescriptorSystem(order={}, inputs={}, outputs={}, domain={:?})",
            self.inner.order(),
            self.inner.inputs(),
            self.inner.outputs(),
            self.inner.domain().as_str()
        )
    }
}

fn stabilize(domain: Domain, alpha: Option<f64>) -> PyResult<RegionSpec> {
    let alpha = alpha.unwrap_or(match domain {
        Domain::Continuous => -0.05,
        Domain::Discrete => 0.95,
    });
    RegionSpec::stabilize(domain, alpha).map_err(py_err)
}

fn proper_region(
    sys: &DescriptorSystem,
    alpha: Option<f64>,
    poles: Option<Vec<Complex64>>,
) -> PyResult<RegionSpec> {
    match poles {
        Some(gamma) => {
            let domain = sys.domain();
            let alpha = alpha.unwrap_or(match domain {
                Domain::Continuous => -0.05,
                Domain::Discrete => 0.95,
            });
            RegionSpec::assign(domain, alpha, gamma).map_err(py_err)
        }
        None => stabilize(sys.domain(), alpha),
    }
}

/// Right factorization `G = N·M⁻¹` with a shared state realization.
#[pyclass(name = "RightFactorization", module = "descfact", frozen)]
struct PyRight {
    inner: StackedFactorRealization,
    system: DescriptorSystem,
    region: RegionSpec,
    assigned: usize,
}

#[pymethods]
impl PyRight {
    fn numerator(&self) -> PyResult<PySystem> {
        Ok(PySystem {
            inner: self.inner.numerator().map_err(py_err)?,
        })
    }

    fn denominator(&self) -> PyResult<PySystem> {
        Ok(PySystem {
            inner: self.inner.denominator().map_err(py_err)?,
        })
    }

    /// Realization of `M` of least order.
    fn minimal_denominator(&self) -> PyResult<PySystem> {
        let tol = Tolerances::for_system(&self.system);
        Ok(PySystem {
            inner: descfact::minimal_denominator(&self.inner, tol.rank_tol).map_err(py_err)?,
        })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[getter]
    fn assigned_poles(&self) -> usize {
        self.assigned
    }

    /// Reconstruction, region and coprimeness checks, as a dict.
    #[pyo3(signature = (samples=16))]
    fn check(&self, py: Python<'_>, samples: usize) -> PyResult<Py<PyAny>> {
        let tol = Tolerances::for_system(&self.system);
        let report = descfact::check_rcf(&self.system, &self.inner, &self.region, &tol, samples)
            .map_err(py_err)?;
        json_to_py(py, &to_json(&report))
    }
}

/// Left factorization `G = M⁻¹·N` with a shared state realization.
#[pyclass(name = "LeftFactorization", module = "descfact", frozen)]
struct PyLeft {
    inner: LeftFactorRealization,
    system: DescriptorSystem,
    region: RegionSpec,
}

#[pymethods]
impl PyLeft {
    fn numerator(&self) -> PyResult<PySystem> {
        Ok(PySystem {
            inner: self.inner.numerator().map_err(py_err)?,
        })
    }

    fn denominator(&self) -> PyResult<PySystem> {
        Ok(PySystem {
            inner: self.inner.denominator().map_err(py_err)?,
        })
    }

    fn minimal_denominator(&self) -> PyResult<PySystem> {
        let tol = Tolerances::for_system(&self.system);
        Ok(PySystem {
            inner: minimal_left_denominator(&self.inner, tol.rank_tol).map_err(py_err)?,
        })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    #[pyo3(signature = (samples=16))]
    fn check(&self, py: Python<'_>, samples: usize) -> PyResult<Py<PyAny>> {
        let dual = self.system.dual();
        let tol = Tolerances::for_system(&dual);
        let right = right_from_left(&self.inner);
        let report =
            descfact::check_rcf(&dual, &right, &self.region, &tol, samples).map_err(py_err)?;
        json_to_py(py, &to_json(&report))
    }
}

fn right(sys: &DescriptorSystem, region: RegionSpec, keep_nondynamic: bool) -> PyResult<PyRight> {
    let tol = Tolerances::for_system(sys);
    let (f, log) = if region.mode() == descfact::PoleMode::Inner {
        descfact::grcfid(sys, &tol)
    } else {
        descfact::grcf(sys, &region, &tol)
    }
    .map_err(py_err)?;
    let f = if keep_nondynamic {
        f
    } else {
        descfact::eliminate_nondynamic(&f).map_err(py_err)?
    };
    Ok(PyRight {
        inner: f,
        system: sys.clone(),
        region,
        assigned: log.assigned_pole_count(),
    })
}

fn left(sys: &DescriptorSystem, region: RegionSpec, keep_nondynamic: bool) -> PyResult<PyLeft> {
    let tol = Tolerances::for_system(sys);
    let method = if region.mode() == descfact::PoleMode::Inner {
        LeftMethod::Inner
    } else {
        LeftMethod::Proper(region.clone())
    };
    let (f, _) = descfact::to_left_factorization(
        sys,
        &method,
        &tol,
        &GrcfOptions::default(),
        keep_nondynamic,
    )
    .map_err(py_err)?;
    Ok(PyLeft {
        inner: f,
        system: sys.clone(),
        region,
    })
}

/// Right coprime factorization with proper stable factors.
#[pyfunction]
#[pyo3(signature = (system, alpha=None, poles=None, keep_nondynamic=false))]
fn grcf(
    system: &PySystem,
    alpha: Option<f64>,
    poles: Option<Vec<Complex64>>,
    keep_nondynamic: bool,
) -> PyResult<PyRight> {
    let region = proper_region(&system.inner, alpha, poles)?;
    right(&system.inner, region, keep_nondynamic)
}

/// Right coprime factorization with an inner denominator.
#[pyfunction]
#[pyo3(signature = (system, keep_nondynamic=false))]
fn grcfid(system: &PySystem, keep_nondynamic: bool) -> PyResult<PyRight> {
    right(
        &system.inner,
        RegionSpec::inner(system.inner.domain()),
        keep_nondynamic,
    )
}

/// Left coprime factorization with proper stable factors.
#[pyfunction]
#[pyo3(signature = (system, alpha=None, poles=None, keep_nondynamic=false))]
fn glcf(
    system: &PySystem,
    alpha: Option<f64>,
    poles: Option<Vec<Complex64>>,
    keep_nondynamic: bool,
) -> PyResult<PyLeft> {
    let region = proper_region(&system.inner, alpha, poles)?;
    left(&system.inner, region, keep_nondynamic)
}

/// Left coprime factorization with an inner denominator.
#[pyfunction]
#[pyo3(signature = (system, keep_nondynamic=false))]
fn glcfid(system: &PySystem, keep_nondynamic: bool) -> PyResult<PyLeft> {
    left(
        &system.inner,
        RegionSpec::inner(system.inner.domain()),
        keep_nondynamic,
    )
}

/// `max ‖M(λ)ᴴM(λ) − I‖_F` over `samples` boundary points.
#[pyfunction]
#[pyo3(signature = (system, samples=64))]
fn innerness(system: &PySystem, samples: usize) -> PyResult<f64> {
    descfact::check_inner(&system.inner, samples).map_err(py_err)
}

#[pymodule]
#[pyo3(name = "descfact")]
fn descfact_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySystem>()?;
    m.add_class::<PyRight>()?;
    m.add_class::<PyLeft>()?;
    m.add_function(wrap_pyfunction!(grcf, m)?)?;
    m.add_function(wrap_pyfunction!(grcfid, m)?)?;
    m.add_function(wrap_pyfunction!(glcf, m)?)?;
    m.add_function(wrap_pyfunction!(glcfid, m)?)?;
    m.add_function(wrap_pyfunction!(innerness, m)?)?;
    m.add("NoSolutionError", m.py().get_type::<NoSolutionError>())?;
    Ok(())
}
