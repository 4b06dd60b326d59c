use std::sync::Arc;

use pyo3::create_exception;
use pyo3::exceptions::{PyNotImplementedError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use timeavg::{
    AveragingParams, Complex64, Error, FdConfig, ModeCoefficients, RecoveryOptions, SpatialGrid, SpectralBasis,
};

create_exception!(timeavg, IllPosedError, PyValueError, "Inversion requested with Re r = 0.");
create_exception!(timeavg, DegenerateModeError, PyValueError, "Some averaging factor vanishes.");

fn to_py(err: Error) -> PyErr {
    match err {
        Error::IllPosed { .. } => IllPosedError::new_err(err.to_string()),
        Error::DegenerateModes { ref modes, .. } => {
            DegenerateModeError::new_err((err.to_string(), modes.clone()))
        }
        Error::Unsupported(_) => PyNotImplementedError::new_err(err.to_string()),
        Error::InvalidArgument(_) | Error::Json(_) => PyValueError::new_err(err.to_string()),
        _ => PyRuntimeError::new_err(err.to_string()),
    }
}

trait IntoPy<T> {
    fn py_err(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for timeavg::Result<T> {
    fn py_err(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

/// Truncated eigenbasis of the spatial operator.
#[pyclass(name = "Basis", frozen)]
struct PyBasis {
    inner: Arc<SpectralBasis>,
}

impl PyBasis {
    fn coeffs(&self, values: Vec<Complex64>) -> PyResult<ModeCoefficients> {
        ModeCoefficients::new(self.inner.clone(), values).py_err()
    }
}

#[pymethods]
impl PyBasis {
    #[staticmethod]
    #[pyo3(signature = (length, n, c_a = 0.0))]
    fn dirichlet(length: f64, n: usize, c_a: f64) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(SpectralBasis::dirichlet(length, n, c_a).py_err()?) })
    }

    #[staticmethod]
    #[pyo3(signature = (length, n, c_a = None))]
    fn periodic(length: f64, n: usize, c_a: Option<f64>) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(SpectralBasis::periodic(length, n, c_a).py_err()?) })
    }

    #[staticmethod]
    #[pyo3(signature = (length, lambdas, c_a = None))]
    fn custom(length: f64, lambdas: Vec<f64>, c_a: Option<f64>) -> PyResult<Self> {
        Ok(Self { inner: Arc::new(SpectralBasis::custom(length, lambdas, c_a).py_err()?) })
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind().as_str()
    }

    #[getter]
    fn length(&self) -> f64 {
        self.inner.length()
    }

    #[getter]
    fn lambdas(&self) -> Vec<f64> {
        self.inner.lambdas().to_vec()
    }

    #[getter]
    fn c_a(&self) -> f64 {
        self.inner.c_a()
    }

    #[getter]
    fn mode_count(&self) -> usize {
        self.inner.mode_count()
    }

    fn sobolev_norm(&self, coeffs: Vec<Complex64>, order: u32) -> PyResult<f64> {
        self.coeffs(coeffs)?.sobolev_norm(order).py_err()
    }

    /// Samples of `Σ c_k v_k` on a uniform grid of `points` points over `[0, L]`.
    fn synthesize(&self, coeffs: Vec<Complex64>, points: usize) -> PyResult<Vec<Complex64>> {
        let grid = SpatialGrid::uniform(self.inner.length(), points).py_err()?;
        timeavg::synthesize_on_grid(&self.coeffs(coeffs)?, &grid).py_err()
    }

    fn project(&self, samples: Vec<Complex64>) -> PyResult<Vec<Complex64>> {
        let grid = SpatialGrid::uniform(self.inner.length(), samples.len()).py_err()?;
        Ok(timeavg::project_from_grid(&samples, self.inner.clone(), &grid).py_err()?.into_values())
    }

    fn __repr__(&self) -> String {
        format!(
            "Basis(kind={:?}, L={}, N={}, c_a={})",
            self.kind(),
            self.inner.length(),
            self.inner.mode_count(),
            self.inner.c_a()
        )
    }
}

fn params(r: Complex64, horizon: f64) -> PyResult<AveragingParams> {
    AveragingParams::new(r, horizon).py_err()
}

#[pyfunction]
#[pyo3(name = "zeta_factor")]
fn zeta_factor(r: Complex64, horizon: f64, lambda: f64) -> Complex64 {
    timeavg::zeta_factor(r, horizon, lambda)
}

#[pyfunction]
fn zeta_factors(basis: &PyBasis, r: Complex64, horizon: f64) -> PyResult<Vec<Complex64>> {
    Ok(timeavg::zeta_factors(&basis.inner, &params(r, horizon)?).values().to_vec())
}

#[pyfunction]
fn propagate(basis: &PyBasis, xi: Vec<Complex64>, t: f64) -> PyResult<Vec<Complex64>> {
    Ok(timeavg::propagate(&basis.coeffs(xi)?, t).into_values())
}

#[pyfunction]
fn apply_time_average(basis: &PyBasis, xi: Vec<Complex64>, r: Complex64, horizon: f64) -> PyResult<Vec<Complex64>> {
    Ok(timeavg::apply_time_average(&basis.coeffs(xi)?, &params(r, horizon)?).into_values())
}

#[pyfunction]
#[pyo3(signature = (basis, mu, r, horizon, allow_ill_posed = false))]
fn recover_initial(
    basis: &PyBasis,
    mu: Vec<Complex64>,
    r: Complex64,
    horizon: f64,
    allow_ill_posed: bool,
) -> PyResult<Vec<Complex64>> {
    let opts = RecoveryOptions { allow_ill_posed, ..Default::default() };
    Ok(timeavg::recover_initial_with(&basis.coeffs(mu)?, &params(r, horizon)?, &opts)
        .py_err()?
        .into_values())
}

/// One coefficient list per requested time.
#[pyfunction]
fn reconstruct_solution(
    basis: &PyBasis,
    mu: Vec<Complex64>,
    r: Complex64,
    horizon: f64,
    times: Vec<f64>,
) -> PyResult<Vec<Vec<Complex64>>> {
    let traj = timeavg::reconstruct_solution(&basis.coeffs(mu)?, &params(r, horizon)?, &times).py_err()?;
    Ok(traj.states().iter().map(|s| s.values().to_vec()).collect())
}

#[pyfunction]
fn stability_bound(r: Complex64, horizon: f64) -> PyResult<f64> {
    timeavg::stability_bound(&params(r, horizon)?).py_err()
}

#[pyfunction]
fn shift_problem<'py>(py: Python<'py>, basis: &PyBasis, r: Complex64, horizon: f64) -> PyResult<Bound<'py, PyDict>> {
    let s = timeavg::shift_problem(basis.inner.clone(), &params(r, horizon)?).py_err()?;
    let d = PyDict::new(py);
    d.set_item("q", s.q)?;
    d.set_item("r_bar", s.r_bar)?;
    d.set_item("shifted_lambdas", s.shifted_lambdas.clone())?;
    Ok(d)
}

#[pyfunction]
fn conditioning_report<'py>(py: Python<'py>, basis: &PyBasis, r: Complex64, horizon: f64) -> PyResult<Bound<'py, PyDict>> {
    let rep = timeavg::conditioning_report(basis.inner.clone(), &params(r, horizon)?).py_err()?;
    let d = PyDict::new(py);
    d.set_item("well_posed", rep.well_posed)?;
    d.set_item("min_abs_zeta", rep.min_abs_zeta)?;
    d.set_item("stability_bound", rep.stability_bound)?;
    d.set_item("sharp_inverse_bound", rep.sharp_inverse_bound)?;
    d.set_item("q", rep.q)?;
    let mut modes = Vec::with_capacity(rep.per_mode.len());
    for m in &rep.per_mode {
        let row = PyDict::new(py);
        row.set_item("k", m.k)?;
        row.set_item("lambda", m.lambda)?;
        row.set_item("zeta", m.zeta)?;
        row.set_item("abs_zeta", m.abs_zeta)?;
        row.set_item("inv_zeta_bound", m.inv_zeta_bound)?;
        row.set_item("psi", m.psi)?;
        modes.push(row);
    }
    d.set_item("per_mode", modes)?;
    Ok(d)
}

/// μ from the finite-difference pipeline (Dirichlet bases only).
#[pyfunction]
fn oracle_mu_coeffs(
    basis: &PyBasis,
    xi: Vec<Complex64>,
    r: Complex64,
    horizon: f64,
    interior_points: usize,
    dt: f64,
) -> PyResult<Vec<Complex64>> {
    let cfg = FdConfig::new(interior_points, dt, basis.inner.length()).py_err()?;
    Ok(timeavg::oracle_mu_coeffs(&basis.coeffs(xi)?, &params(r, horizon)?, &cfg)
        .py_err()?
        .into_values())
}

#[pymodule]
#[pyo3(name = "timeavg")]
fn timeavg_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyBasis>()?;
    m.add_function(wrap_pyfunction!(zeta_factor, m)?)?;
    m.add_function(wrap_pyfunction!(zeta_factors, m)?)?;
    m.add_function(wrap_pyfunction!(propagate, m)?)?;
    m.add_function(wrap_pyfunction!(apply_time_average, m)?)?;
    m.add_function(wrap_pyfunction!(recover_initial, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_solution, m)?)?;
    m.add_function(wrap_pyfunction!(stability_bound, m)?)?;
    m.add_function(wrap_pyfunction!(shift_problem, m)?)?;
    m.add_function(wrap_pyfunction!(conditioning_report, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_mu_coeffs, m)?)?;
    m.add("IllPosedError", m.py().get_type::<IllPosedError>())?;
    m.add("DegenerateModeError", m.py().get_type::<DegenerateModeError>())?;
    Ok(())
}
