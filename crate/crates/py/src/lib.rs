//! Python bindings for `softedge`.

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use softedge::expansion::{shipped_table, write_table, ExpansionCurve, Quantity, TableHeader};
use softedge::finiten::{e2n_scaled, kth_largest_finite_cdf as finite_cdf};
use softedge::fredholm::{kth_largest_limit_cdf as limit_kth, limit_f_beta};
use softedge::mc::sample_with_workers;
use softedge::painleve::{solve_q, total_integral as total};
use softedge::validation::run_criterion as run_one;
use softedge::{Beta, EnsembleSpec, Family};

create_exception!(softedge_py, SoftedgeError, PyException);

fn err(e: softedge::Error) -> PyErr {
    SoftedgeError::new_err(e.to_string())
}

fn beta(b: u32) -> PyResult<Beta> {
    Beta::new(b).map_err(err)
}

/// An ensemble: `Ensemble("gaussian", 2, 10)` or `Ensemble("laguerre", 1, 10, p=40.0)`.
#[pyclass(name = "Ensemble", frozen)]
struct PyEnsemble {
    spec: EnsembleSpec,
}

#[pymethods]
impl PyEnsemble {
    #[new]
    #[pyo3(signature = (family, beta, n, p=None))]
    fn new(family: &str, beta: u32, n: usize, p: Option<f64>) -> PyResult<Self> {
        let b = self::beta(beta)?;
        let spec = match (family, p) {
            ("gaussian", None) => EnsembleSpec::gaussian(b, n),
            ("laguerre", Some(p)) => EnsembleSpec::laguerre(b, n, p),
            ("laguerre", None) => {
                return Err(SoftedgeError::new_err("laguerre needs p"));
            }
            _ => return Err(SoftedgeError::new_err(format!("unknown family {family}"))),
        }
        .map_err(err)?;
        Ok(PyEnsemble { spec })
    }

    #[getter]
    fn family(&self) -> &'static str {
        match self.spec.family {
            Family::Gaussian => "gaussian",
            Family::Laguerre => "laguerre",
        }
    }

    #[getter]
    fn beta(&self) -> u32 {
        self.spec.beta.value()
    }

    #[getter]
    fn n(&self) -> usize {
        self.spec.n
    }

    /// Scaling at the shifted index: `mu, sigma, h, tau, n_prime`.
    fn scaling<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let sc = self.spec.expansion_scaling().map_err(err)?;
        let d = PyDict::new(py);
        d.set_item("mu", sc.mu)?;
        d.set_item("sigma", sc.sigma)?;
        d.set_item("h", sc.h)?;
        d.set_item("tau", sc.tau)?;
        d.set_item("n_prime", sc.n_prime)?;
        Ok(d)
    }

    fn __repr__(&self) -> String {
        format!("{:?}", self.spec)
    }
}

/// `F_beta(s; xi)`.
#[pyfunction]
#[pyo3(signature = (beta, s, xi=1.0))]
fn limit_cdf(beta: u32, s: f64, xi: f64) -> PyResult<f64> {
    limit_f_beta(self::beta(beta)?, s, xi).map_err(err)
}

/// Limit CDF of the k-th largest level (`k = 0` the largest).
#[pyfunction]
fn kth_largest_limit_cdf(beta: u32, k: usize, s: f64) -> PyResult<f64> {
    limit_kth(self::beta(beta)?, k, s).map_err(err)
}

/// Exact beta = 2 `E_n(mu + sigma s; xi)`.
#[pyfunction]
#[pyo3(signature = (ensemble, s, xi=1.0))]
fn finite_generating(ensemble: &PyEnsemble, s: f64, xi: f64) -> PyResult<f64> {
    e2n_scaled(&ensemble.spec, s, xi).map_err(err)
}

/// Exact beta = 2 CDF of the k-th largest level at level `x`.
#[pyfunction]
fn kth_largest_finite_cdf(ensemble: &PyEnsemble, k: usize, x: f64) -> PyResult<f64> {
    finite_cdf(&ensemble.spec, k, x).map_err(err)
}

/// Expansion partial sums `[m = 0, ..., m]` at each `s`; `k` selects the
/// k-th largest level, otherwise the generating function at `xi`.
#[pyfunction]
#[pyo3(signature = (ensemble, s, m, xi=1.0, k=None))]
fn expand(
    ensemble: &PyEnsemble,
    s: Vec<f64>,
    m: u32,
    xi: f64,
    k: Option<usize>,
) -> PyResult<Vec<Vec<f64>>> {
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let quantity = match k {
        Some(k) => Quantity::KthLargest { k },
        None => Quantity::Generating { xi },
    };
    let lo = s.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = s.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let hi = if hi > lo { hi } else { lo + 1.0 };
    let curve = ExpansionCurve::new(shipped_table(), &ensemble.spec, &quantity, m, (lo, hi))
        .map_err(err)?;
    s.iter()
        .map(|&x| curve.partial_sums(x).map_err(err))
        .collect()
}

/// Painlevé II `q(s; xi)` at each `s`.
#[pyfunction]
fn painleve_q(xi: f64, s: Vec<f64>) -> PyResult<Vec<f64>> {
    let sol = solve_q(
        xi,
        softedge::painleve::DEFAULT_L_MINUS,
        softedge::painleve::DEFAULT_L_PLUS,
    )
    .map_err(err)?;
    s.iter().map(|&x| sol.q(x).map_err(err)).collect()
}

/// `(integral of q, artanh sqrt(xi))`.
#[pyfunction]
fn total_integral(xi: f64) -> PyResult<(f64, f64)> {
    let t = total(xi).map_err(err)?;
    Ok((t.value, t.exact))
}

/// The shipped coefficient table as TOML text.
#[pyfunction]
fn coefficient_table() -> PyResult<String> {
    write_table(shipped_table(), &TableHeader::default()).map_err(err)
}

/// `P_{beta,j,k}(s, tau)` as text.
#[pyfunction]
fn coefficient(beta: u32, j: u32, k: u32) -> PyResult<String> {
    Ok(shipped_table().poly(beta, j, k).map_err(err)?.to_string())
}

/// Sorted spectra of `count` draws.
#[pyfunction]
#[pyo3(signature = (ensemble, count, seed, workers=8))]
fn sample(
    ensemble: &PyEnsemble,
    count: usize,
    seed: u64,
    workers: usize,
) -> PyResult<Vec<Vec<f64>>> {
    Ok(sample_with_workers(&ensemble.spec, count, seed, workers)
        .map_err(err)?
        .spectra)
}

/// One acceptance criterion: `{"id", "name", "passed", "detail", "seconds"}`.
#[pyfunction]
fn run_criterion<'py>(py: Python<'py>, id: u32) -> PyResult<Bound<'py, PyDict>> {
    let r = run_one(id);
    let d = PyDict::new(py);
    d.set_item("id", r.id)?;
    d.set_item("name", r.name)?;
    d.set_item("passed", r.passed)?;
    d.set_item("detail", r.detail)?;
    d.set_item("seconds", r.seconds)?;
    Ok(d)
}

#[pymodule]
fn softedge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SoftedgeError", m.py().get_type::<SoftedgeError>())?;
    m.add_class::<PyEnsemble>()?;
    m.add_function(wrap_pyfunction!(limit_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(kth_largest_limit_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(finite_generating, m)?)?;
    m.add_function(wrap_pyfunction!(kth_largest_finite_cdf, m)?)?;
    m.add_function(wrap_pyfunction!(expand, m)?)?;
    m.add_function(wrap_pyfunction!(painleve_q, m)?)?;
    m.add_function(wrap_pyfunction!(total_integral, m)?)?;
    m.add_function(wrap_pyfunction!(coefficient_table, m)?)?;
    m.add_function(wrap_pyfunction!(coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(sample, m)?)?;
    m.add_function(wrap_pyfunction!(run_criterion, m)?)?;
    Ok(())
}
