//! Python bindings. Every check returns a plain dict with the two side
//! values, their tail bounds and the verdict.

use num_complex::Complex64;
use psflab_core as core;
use psflab_core::{DualEvaluation, EvalMode, PsfError, TruncationBudget};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

fn to_py(e: PsfError) -> PyErr {
    match e {
        PsfError::InvalidParameter(_) | PsfError::DimensionMismatch { .. } | PsfError::Mode(_) => {
            PyValueError::new_err(e.to_string())
        }
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn budget(tol: f64, max_shell: u64) -> PyResult<TruncationBudget> {
    let default = TruncationBudget::default();
    TruncationBudget::new(max_shell, tol, default.max_terms).map_err(to_py)
}

fn eval_dict<'py>(py: Python<'py>, identity: &str, ev: &DualEvaluation) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("identity", identity)?;
    d.set_item("lhs", ev.lhs_value)?;
    d.set_item("rhs", ev.rhs_value)?;
    d.set_item("abs_discrepancy", ev.discrepancy)?;
    d.set_item("lhs_tail", ev.lhs_tail)?;
    d.set_item("rhs_tail", ev.rhs_tail)?;
    d.set_item("shells_used", (ev.shells_lhs, ev.shells_rhs))?;
    d.set_item("chosen_side", ev.chosen_side.to_string())?;
    d.set_item("budget_exhausted", ev.budget_exhausted)?;
    d.set_item("passed", ev.passed)?;
    Ok(d)
}

/// Shifted, modulated Gaussian `exp(-|x - h|^2 / (2 width)) e^{i m x}`.
#[pyclass(name = "TestFunction", module = "psflab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyTestFunction {
    inner: core::TestFunction,
}

#[pymethods]
impl PyTestFunction {
    #[new]
    #[pyo3(signature = (width, dim = 1, shift = None, modulation = None))]
    fn new(width: f64, dim: usize, shift: Option<Vec<f64>>, modulation: Option<Vec<f64>>) -> PyResult<Self> {
        let g = core::gaussian(width, dim).map_err(to_py)?;
        let h = shift.unwrap_or_else(|| vec![0.0; dim]);
        let m = modulation.unwrap_or_else(|| vec![0.0; dim]);
        Ok(Self { inner: g.shift_modulate(&h, &m).map_err(to_py)? })
    }

    /// The twelve-member battery used by the CLI's `--battery` flag.
    #[staticmethod]
    fn battery(dim: usize) -> PyResult<Vec<Self>> {
        Ok(core::test_battery(dim).map_err(to_py)?.into_iter().map(|inner| Self { inner }).collect())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn width(&self) -> f64 {
        self.inner.width()
    }

    fn value(&self, x: Vec<f64>) -> PyResult<Complex64> {
        self.check_dim(x.len())?;
        Ok(self.inner.value(&x))
    }

    /// Unitary Fourier transform at `xi`.
    fn fourier(&self, xi: Vec<f64>) -> PyResult<Complex64> {
        self.check_dim(xi.len())?;
        Ok(self.inner.fourier(&xi))
    }

    fn integral(&self) -> Complex64 {
        self.inner.integral()
    }

    fn __repr__(&self) -> String {
        format!(
            "TestFunction(width={}, shift={:?}, modulation={:?})",
            self.inner.width(),
            self.inner.shift(),
            self.inner.modulation()
        )
    }
}

impl PyTestFunction {
    fn check_dim(&self, got: usize) -> PyResult<()> {
        if got != self.inner.dim() {
            return Err(to_py(PsfError::DimensionMismatch { expected: self.inner.dim(), got }));
        }
        Ok(())
    }
}

fn pointwise<'py>(
    py: Python<'py>,
    pair: PyResult<core::DualKernelPair>,
    x: Vec<f64>,
    tol: f64,
    max_shell: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let pair = pair?;
    let b = budget(tol, max_shell)?;
    let ev = py.detach(|| core::evaluate_identity(&pair, &x, &b)).map_err(to_py)?;
    eval_dict(py, pair.label(), &ev)
}

#[pyfunction]
#[pyo3(signature = (t, dim = 1, tol = 1e-12, max_shell = 100_000))]
fn theta<'py>(py: Python<'py>, t: f64, dim: usize, tol: f64, max_shell: u64) -> PyResult<Bound<'py, PyDict>> {
    pointwise(py, core::theta_pair(t, dim).map_err(to_py), vec![0.0; dim], tol, max_shell)
}

#[pyfunction]
#[pyo3(signature = (t, x, tol = 1e-12, max_shell = 100_000))]
fn heat<'py>(py: Python<'py>, t: f64, x: Vec<f64>, tol: f64, max_shell: u64) -> PyResult<Bound<'py, PyDict>> {
    pointwise(py, core::heat_pair(t, x.len()).map_err(to_py), x, tol, max_shell)
}

#[pyfunction]
#[pyo3(signature = (t, x, tol = 1e-12, max_shell = 100_000))]
fn poisson<'py>(py: Python<'py>, t: f64, x: Vec<f64>, tol: f64, max_shell: u64) -> PyResult<Bound<'py, PyDict>> {
    pointwise(py, core::poisson_pair(t, x.len()).map_err(to_py), x, tol, max_shell)
}

/// Pointwise lift identity; needs `alpha < -n`.
#[pyfunction]
#[pyo3(signature = (alpha, x, tol = 1e-12, max_shell = 100_000))]
fn bessel<'py>(py: Python<'py>, alpha: f64, x: Vec<f64>, tol: f64, max_shell: u64) -> PyResult<Bound<'py, PyDict>> {
    pointwise(py, core::bessel_pair(alpha, x.len(), EvalMode::Pointwise).map_err(to_py), x, tol, max_shell)
}

/// Lift identity paired with a one-dimensional test function, any `alpha < 0`.
#[pyfunction]
#[pyo3(signature = (alpha, f, tol = 1e-12, max_shell = 100_000))]
fn bessel_weak<'py>(
    py: Python<'py>,
    alpha: f64,
    f: &PyTestFunction,
    tol: f64,
    max_shell: u64,
) -> PyResult<Bound<'py, PyDict>> {
    let b = budget(tol, max_shell)?;
    let f = f.inner.clone();
    let ev = py.detach(|| core::weak::bessel_weak_check(alpha, &f, &b)).map_err(to_py)?;
    eval_dict(py, "bessel_weak", &ev)
}

/// Operator identity for the symbol `tau`.
#[pyfunction]
#[pyo3(signature = (tau, x, tol = 1e-12, max_shell = 100_000))]
fn symbol<'py>(py: Python<'py>, tau: &PyTestFunction, x: Vec<f64>, tol: f64, max_shell: u64) -> PyResult<Bound<'py, PyDict>> {
    pointwise(py, core::symbol_pair(&tau.inner, x.len()).map_err(to_py), x, tol, max_shell)
}

/// `sum f(x + 2 pi k)` against `(2 pi)^{-n/2} sum F f(k) e^{ikx}`.
#[pyfunction]
#[pyo3(signature = (f, x, tol = 1e-12, max_shell = 100_000))]
fn classical_psf<'py>(py: Python<'py>, f: &PyTestFunction, x: Vec<f64>, tol: f64, max_shell: u64) -> PyResult<Bound<'py, PyDict>> {
    let b = budget(tol, max_shell)?;
    let f = f.inner.clone();
    let ev = py.detach(|| core::classical_psf(&f, &x, &b)).map_err(to_py)?;
    eval_dict(py, "psf", &ev)
}

#[pyfunction]
#[pyo3(signature = (tol = 1e-12, max_shell = 100_000))]
fn corollary<'py>(py: Python<'py>, tol: f64, max_shell: u64) -> PyResult<Bound<'py, PyDict>> {
    let b = budget(tol, max_shell)?;
    let ev = py.detach(|| core::corollary_3_5_check(&b)).map_err(to_py)?;
    eval_dict(py, "corollary", &ev)
}

/// Exponential comb against the Dirac comb, paired with `f`.
#[pyfunction]
#[pyo3(signature = (f, tol = 1e-12, max_shell = 100_000))]
fn weak_comb<'py>(py: Python<'py>, f: &PyTestFunction, tol: f64, max_shell: u64) -> PyResult<Bound<'py, PyDict>> {
    let b = budget(tol, max_shell)?;
    let f = f.inner.clone();
    let ev = py.detach(|| core::weak::weak_comb_check(&f, &b)).map_err(to_py)?;
    eval_dict(py, "weak", &ev)
}

/// Symmetric partial sum of the exponential comb paired with `f`.
#[pyfunction]
fn pair_exp_comb(f: &PyTestFunction, truncation: u64) -> PyResult<Complex64> {
    Ok(core::pair_exp_comb(&f.inner, truncation).map_err(to_py)?.value)
}

/// Littlewood-Paley report: one dict per level plus the summary fields.
#[pyfunction]
#[pyo3(signature = (dim = 1, j_max = 8, points = 1024, seed = 0))]
fn lp_report<'py>(py: Python<'py>, dim: usize, j_max: u32, points: usize, seed: u64) -> PyResult<Bound<'py, PyDict>> {
    let rep = py.detach(|| core::csn_report(dim, j_max, points, seed)).map_err(to_py)?;
    let d = PyDict::new(py);
    let mut levels = Vec::with_capacity(rep.levels.len());
    for l in &rep.levels {
        let ld = PyDict::new(py);
        ld.set_item("j", l.j)?;
        ld.set_item("sup", l.sup_estimate)?;
        ld.set_item("ratio", l.ratio)?;
        ld.set_item("count_bound", l.count_bound)?;
        levels.push(ld);
    }
    d.set_item("dim", rep.dim)?;
    d.set_item("grid_points", rep.grid_points)?;
    d.set_item("levels", levels)?;
    d.set_item("max_ratio", rep.max_ratio)?;
    d.set_item("passed", rep.passed)?;
    Ok(d)
}

/// Warped comb for `psi(x) = slope x + amp sin x` with multiplier
/// `g = 1` or, when `g_width` is given, a Gaussian centred at `g_center`.
#[pyfunction]
#[pyo3(signature = (f, slope = 1.0, amp = 0.1, g_width = None, g_center = 0.0, eps = 1e-2, truncation = 32, tol = 1e-12))]
#[allow(clippy::too_many_arguments)]
fn warped_comb<'py>(
    py: Python<'py>,
    f: &PyTestFunction,
    slope: f64,
    amp: f64,
    g_width: Option<f64>,
    g_center: f64,
    eps: f64,
    truncation: u64,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let d = core::Diffeo1D::sine_perturbed(slope, amp).map_err(to_py)?;
    let g = match g_width {
        Some(w) => core::Multiplier::gaussian(vec![g_center], w).map_err(to_py)?,
        None => core::Multiplier::one(),
    };
    let b = budget(tol, TruncationBudget::default().max_shell)?;
    let f = f.inner.clone();
    let ev = py.detach(|| core::warped_comb_check(&d, &g, &f, eps, truncation, &b)).map_err(to_py)?;
    eval_dict(py, "diffeo", &ev)
}

/// Comb under `x -> A x + b`; `matrix` is row-major.
#[pyfunction]
#[pyo3(signature = (f, matrix, offset = None, tol = 1e-12))]
fn affine_comb<'py>(
    py: Python<'py>,
    f: &PyTestFunction,
    matrix: Vec<f64>,
    offset: Option<Vec<f64>>,
    tol: f64,
) -> PyResult<Bound<'py, PyDict>> {
    let n = f.inner.dim();
    let map = core::AffineMap::new(&matrix, &offset.unwrap_or_else(|| vec![0.0; n])).map_err(to_py)?;
    let b = budget(tol, TruncationBudget::default().max_shell)?;
    let f = f.inner.clone();
    let ev = py.detach(|| core::affine_comb_check(&map, &f, &b)).map_err(to_py)?;
    eval_dict(py, "affine", &ev)
}

/// Predicted cheaper side for a named kernel pair at `x`.
#[pyfunction]
#[pyo3(signature = (identity, t, x, tol = 1e-12))]
fn preferred_side(identity: &str, t: f64, x: Vec<f64>, tol: f64) -> PyResult<(String, Option<u64>, Option<u64>)> {
    let n = x.len();
    let pair = match identity {
        "heat" => core::heat_pair(t, n),
        "theta" => core::theta_pair(t, n),
        "poisson" => core::poisson_pair(t, n),
        other => return Err(PyValueError::new_err(format!("unknown identity {other:?}"))),
    }
    .map_err(to_py)?;
    let p = core::preferred_side_at(&pair, &x, tol);
    Ok((p.side.to_string(), p.shells, p.other_shells))
}

#[pymodule]
fn psflab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", core::ENGINE_VERSION)?;
    m.add_class::<PyTestFunction>()?;
    m.add_function(wrap_pyfunction!(theta, m)?)?;
    m.add_function(wrap_pyfunction!(heat, m)?)?;
    m.add_function(wrap_pyfunction!(poisson, m)?)?;
    m.add_function(wrap_pyfunction!(bessel, m)?)?;
    m.add_function(wrap_pyfunction!(bessel_weak, m)?)?;
    m.add_function(wrap_pyfunction!(symbol, m)?)?;
    m.add_function(wrap_pyfunction!(classical_psf, m)?)?;
    m.add_function(wrap_pyfunction!(corollary, m)?)?;
    m.add_function(wrap_pyfunction!(weak_comb, m)?)?;
    m.add_function(wrap_pyfunction!(pair_exp_comb, m)?)?;
    m.add_function(wrap_pyfunction!(lp_report, m)?)?;
    m.add_function(wrap_pyfunction!(warped_comb, m)?)?;
    m.add_function(wrap_pyfunction!(affine_comb, m)?)?;
    m.add_function(wrap_pyfunction!(preferred_side, m)?)?;
    Ok(())
}
