//! Python bindings. Arrays cross the boundary as lists of floats.

use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use ::mtlab::analysis::{bias_bound_report, grid_for, theorem_sweep, tradeoff_study, TradeoffConfig};
use ::mtlab::estimator::{multitaper as mt, periodogram as pg, SampleRecord};
use ::mtlab::prolate::{compute_dpss, ProlateParams};
use ::mtlab::synth::{generate_stream, true_spectrum};
use ::mtlab::window::{spectral_window as window, split_leakage};
use ::mtlab::{Error, FrequencyGrid};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(_) => PyOSError::new_err(e.to_string()),
        Error::NoConvergence { .. } | Error::InvariantViolated(_) => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn grid(m: Option<usize>, n: usize, factor: usize) -> PyResult<FrequencyGrid> {
    match m {
        Some(m) => FrequencyGrid::new(m),
        None => grid_for(n, factor),
    }
    .map_err(to_py)
}

/// Leading discrete prolate spheroidal sequences for `(n, w)`.
#[pyclass(name = "Dpss", frozen)]
struct PyDpss {
    basis: ::mtlab::ProlateBasis,
}

#[pymethods]
impl PyDpss {
    #[new]
    #[pyo3(signature = (n, w, k=None))]
    fn new(n: usize, w: f64, k: Option<usize>) -> PyResult<Self> {
        let params = match k {
            Some(k) => ProlateParams::new(n, w, k),
            None => ProlateParams::with_default_k(n, w),
        }
        .map_err(to_py)?;
        Ok(Self {
            basis: compute_dpss(&params).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> usize {
        self.basis.params().n()
    }

    #[getter]
    fn w(&self) -> f64 {
        self.basis.params().w()
    }

    #[getter]
    fn k(&self) -> usize {
        self.basis.len()
    }

    /// `k` rows of length `n`.
    #[getter]
    fn sequences(&self) -> Vec<Vec<f64>> {
        self.basis.sequences().map(<[f64]>::to_vec).collect()
    }

    #[getter]
    fn eigenvalues(&self) -> Vec<f64> {
        self.basis.eigenvalues().to_vec()
    }

    /// All `n` eigenvalues of the concentration matrix, descending.
    #[getter]
    fn all_eigenvalues(&self) -> Option<Vec<f64>> {
        self.basis.all_eigenvalues().map(<[f64]>::to_vec)
    }

    /// Matrix trace, `2nw`.
    #[getter]
    fn trace(&self) -> f64 {
        self.basis.full_eigenvalue_sum()
    }

    fn gram_deviation(&self) -> f64 {
        self.basis.gram_deviation()
    }

    fn residuals(&self) -> Vec<f64> {
        self.basis.residuals()
    }

    fn __repr__(&self) -> String {
        format!("Dpss(n={}, w={}, k={})", self.n(), self.w(), self.k())
    }
}

/// A stationary Gaussian process with known spectrum, e.g. `"ar:1.372,-0.7"`.
#[pyclass(name = "ProcessModel", frozen)]
struct PyProcessModel {
    model: ::mtlab::ProcessModel,
}

#[pymethods]
impl PyProcessModel {
    #[new]
    fn new(spec: &str) -> PyResult<Self> {
        Ok(Self {
            model: spec.parse().map_err(to_py)?,
        })
    }

    fn spectral_density(&self, xi: f64) -> f64 {
        self.model.spectral_density(xi)
    }

    #[getter]
    fn variance(&self) -> f64 {
        self.model.variance()
    }

    /// A record of length `n`; `stream` selects an independent substream.
    #[pyo3(signature = (n, seed, stream=0))]
    fn generate(&self, n: usize, seed: u64, stream: u64) -> PyResult<Vec<f64>> {
        Ok(generate_stream(&self.model, n, seed, stream)
            .map_err(to_py)?
            .values()
            .to_vec())
    }

    /// `(xi, S(xi))` on an `m`-point grid.
    fn true_spectrum(&self, m: usize) -> PyResult<(Vec<f64>, Vec<f64>)> {
        let grid = FrequencyGrid::new(m).map_err(to_py)?;
        let s = true_spectrum(&self.model, &grid);
        Ok((grid.points().to_vec(), s))
    }

    fn __repr__(&self) -> String {
        format!("ProcessModel({:?})", self.model.to_string())
    }
}

/// Multitaper estimate `(xi, S_hat)`; `k` defaults to floor(2nw), `m` to 4n.
#[pyfunction]
#[pyo3(signature = (x, w, k=None, m=None))]
fn multitaper(x: Vec<f64>, w: f64, k: Option<usize>, m: Option<usize>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let record = SampleRecord::new(x).map_err(to_py)?;
    let n = record.len();
    let params = match k {
        Some(k) => ProlateParams::new(n, w, k),
        None => ProlateParams::with_default_k(n, w),
    }
    .map_err(to_py)?;
    let grid = grid(m, n, 4)?;
    let basis = compute_dpss(&params).map_err(to_py)?;
    let estimate = mt(&record, &basis, params.k(), &grid).map_err(to_py)?;
    Ok((grid.points().to_vec(), estimate.values))
}

/// Periodogram `(xi, |X|^2 / n)`; `m` defaults to 4n.
#[pyfunction]
#[pyo3(signature = (x, m=None))]
fn periodogram(x: Vec<f64>, m: Option<usize>) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let record = SampleRecord::new(x).map_err(to_py)?;
    let grid = grid(m, record.len(), 4)?;
    let estimate = pg(&record, &grid).map_err(to_py)?;
    Ok((grid.points().to_vec(), estimate.values))
}

/// Spectral window and its L1 distance to the ideal kernel.
#[pyfunction]
#[pyo3(signature = (n, w, k=None, m=None))]
fn spectral_window<'py>(
    py: Python<'py>,
    n: usize,
    w: f64,
    k: Option<usize>,
    m: Option<usize>,
) -> PyResult<Bound<'py, PyDict>> {
    let params = match k {
        Some(k) => ProlateParams::new(n, w, k),
        None => ProlateParams::with_default_k(n, w),
    }
    .map_err(to_py)?;
    let grid = grid(m, n, 64)?;
    let basis = compute_dpss(&params).map_err(to_py)?;
    let win = window(&basis, params.k(), &grid).map_err(to_py)?;
    let split = split_leakage(&win).map_err(to_py)?;
    let out = PyDict::new(py);
    out.set_item("xi", grid.points().to_vec())?;
    out.set_item("window", win.values().to_vec())?;
    out.set_item("ideal", win.ideal_values())?;
    out.set_item("l1_distance", split.total())?;
    out.set_item("narrow_band", split.narrow_band)?;
    out.set_item("broad_band", split.broad_band)?;
    out.set_item("broad_band_from_eigenvalues", split.broad_band_from_eigenvalues)?;
    Ok(out)
}

/// Leakage quantities for each `n`, one dict per row.
#[pyfunction]
#[pyo3(signature = (n_list, w, grid_factor=64))]
fn sweep<'py>(py: Python<'py>, n_list: Vec<usize>, w: f64, grid_factor: usize) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let result = py
        .detach(|| theorem_sweep(&n_list, w, grid_factor))
        .map_err(to_py)?;
    result
        .rows
        .iter()
        .map(|r| {
            let d = PyDict::new(py);
            d.set_item("n", r.n)?;
            d.set_item("big_k", r.big_k)?;
            d.set_item("l1_distance", r.l1_distance)?;
            d.set_item("narrow_band", r.narrow_band)?;
            d.set_item("broad_band", r.broad_band)?;
            d.set_item("broad_band_from_eigenvalues", r.broad_band_from_eigenvalues)?;
            d.set_item("fejer_defect", r.fejer_defect)?;
            d.set_item("trace", r.trace)?;
            d.set_item("eigenvalue_sum", r.eigenvalue_sum)?;
            d.set_item("spectrum_defect", r.spectrum_defect)?;
            d.set_item("l1_ratio", r.l1_ratio())?;
            d.set_item("fejer_ratio", r.fejer_ratio())?;
            Ok(d)
        })
        .collect()
}

/// Monte Carlo bias/variance summary, one dict per `K`.
#[pyfunction]
#[pyo3(signature = (model, n, w, k_list, trials=2000, seed=0, m=None))]
#[allow(clippy::too_many_arguments)]
fn tradeoff<'py>(
    py: Python<'py>,
    model: &PyProcessModel,
    n: usize,
    w: f64,
    k_list: Vec<usize>,
    trials: usize,
    seed: u64,
    m: Option<usize>,
) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let config = TradeoffConfig {
        n,
        w,
        k_list,
        trials,
        seed,
        grid_points: m.unwrap_or(4 * n),
    };
    let reports = py.detach(|| tradeoff_study(&model.model, &config)).map_err(to_py)?;
    reports
        .iter()
        .map(|r| {
            let b = bias_bound_report(r).map_err(to_py)?;
            let d = PyDict::new(py);
            d.set_item("k", r.big_k)?;
            d.set_item("xi", r.grid.points().to_vec())?;
            d.set_item("true_spectrum", r.true_spectrum.clone())?;
            d.set_item("expected", r.expected.clone())?;
            d.set_item("mean", r.mean.clone())?;
            d.set_item("variance", r.pointwise_variance.clone())?;
            d.set_item("standard_errors", r.standard_errors.clone())?;
            d.set_item("mse", r.mse_summary)?;
            d.set_item("mean_variance", r.mean_variance)?;
            d.set_item("l1_distance", r.l1_distance)?;
            d.set_item("leakage_gap", b.leakage_gap)?;
            d.set_item("leakage_bound", b.leakage_bound)?;
            d.set_item("smoothing_term", b.smoothing_term)?;
            Ok(d)
        })
        .collect()
}

#[pymodule(name = "mtlab")]
fn mtlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDpss>()?;
    m.add_class::<PyProcessModel>()?;
    m.add_function(wrap_pyfunction!(multitaper, m)?)?;
    m.add_function(wrap_pyfunction!(periodogram, m)?)?;
    m.add_function(wrap_pyfunction!(spectral_window, m)?)?;
    m.add_function(wrap_pyfunction!(sweep, m)?)?;
    m.add_function(wrap_pyfunction!(tradeoff, m)?)?;
    Ok(())
}
