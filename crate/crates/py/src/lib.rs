//! Python bindings: configurations, runs, output readers and the continuum
//! formulas.

use std::path::PathBuf;

use hallwave::dynamics::{classify_regime as classify, markov_rate as rate};
use hallwave::lattice::{build_lattice, Boundary, LatticeGeometry, PotentialSpec};
use hallwave::run::{self as hrun, ParsedConfig, RunArtifacts};
use hallwave::spectral::{diagonalize, LandauAnalytics as Analytics};
use hallwave::Error;
use pyo3::exceptions::{PyOSError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Config(_) | Error::Parse { .. } | Error::GeometryMismatch(_) | Error::DimensionCap { .. } => PyValueError::new_err(e.to_string()),
        Error::Io { .. } => PyOSError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, text: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (text,))
}

fn boundary(s: &str) -> PyResult<Boundary> {
    match s {
        "open" => Ok(Boundary::Open),
        "periodic" => Ok(Boundary::Periodic),
        _ => Err(PyValueError::new_err(format!("boundary must be 'open' or 'periodic', got '{s}'"))),
    }
}

/// A validated run configuration.
#[pyclass(module = "hallwave")]
struct Config {
    inner: ParsedConfig,
}

#[pymethods]
impl Config {
    #[staticmethod]
    fn from_toml(text: &str) -> PyResult<Self> {
        Ok(Self { inner: hrun::parse_config(text).map_err(to_py)? })
    }

    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        Ok(Self { inner: hrun::load_preset(name).map_err(to_py)? })
    }

    fn to_toml(&self) -> String {
        self.inner.config.to_toml()
    }

    #[getter]
    fn scenario(&self) -> &'static str {
        self.inner.config.scenario.name()
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.config.seed
    }

    #[getter]
    fn defaults_applied(&self) -> Vec<String> {
        self.inner.defaults_applied.clone()
    }

    #[getter]
    fn run_id(&self) -> String {
        hrun::run_id(&self.inner.config)
    }

    fn __repr__(&self) -> String {
        format!("Config(scenario='{}', run_id='{}')", self.scenario(), self.run_id())
    }
}

/// In-memory outputs of a run.
#[pyclass(module = "hallwave")]
struct Artifacts {
    inner: RunArtifacts,
}

#[pymethods]
impl Artifacts {
    #[getter]
    fn summary<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json_to_py(py, &self.inner.summary.to_string())
    }

    #[getter]
    fn warnings(&self) -> Vec<String> {
        self.inner.warnings.clone()
    }

    #[getter]
    fn violations(&self) -> Vec<String> {
        self.inner.violations.clone()
    }

    /// File names in write order.
    fn names(&self) -> Vec<String> {
        self.inner.files.iter().map(|(n, _)| n.clone()).collect()
    }

    fn file<'py>(&self, py: Python<'py>, name: &str) -> PyResult<Bound<'py, PyBytes>> {
        let b = self.inner.file(name).ok_or_else(|| PyValueError::new_err(format!("no output named '{name}'")))?;
        Ok(PyBytes::new(py, b))
    }

    /// Parse a CSV output into `(header, rows)`.
    fn csv(&self, name: &str) -> PyResult<(Vec<String>, Vec<Vec<f64>>)> {
        let b = self.inner.file(name).ok_or_else(|| PyValueError::new_err(format!("no output named '{name}'")))?;
        hrun::parse_csv(&String::from_utf8_lossy(b)).map_err(to_py)
    }

    /// Decode a snapshot output.
    fn snapshots(&self, name: &str) -> PyResult<Snapshots> {
        let b = self.inner.file(name).ok_or_else(|| PyValueError::new_err(format!("no output named '{name}'")))?;
        Ok(Snapshots { inner: hrun::SnapshotStack::decode(b).map_err(to_py)? })
    }
}

/// Frames read from a snapshot file.
#[pyclass(module = "hallwave")]
struct Snapshots {
    inner: hrun::SnapshotStack,
}

#[pymethods]
impl Snapshots {
    #[getter]
    fn nx(&self) -> usize {
        self.inner.nx
    }

    #[getter]
    fn ny(&self) -> usize {
        self.inner.ny
    }

    #[getter]
    fn run_id(&self) -> String {
        self.inner.run_id.clone()
    }

    fn __len__(&self) -> usize {
        self.inner.frames.len()
    }

    /// Frame `k` as `ny` rows of `nx` values.
    fn frame(&self, k: usize) -> PyResult<Vec<Vec<f64>>> {
        let f = self.inner.frames.get(k).ok_or_else(|| PyValueError::new_err(format!("frame {k} out of range")))?;
        Ok(f.chunks(self.inner.nx.max(1)).map(<[f64]>::to_vec).collect())
    }
}

/// Continuum Landau-level quantities for flux `alpha` and slope `u0`.
#[pyclass(module = "hallwave", frozen)]
struct LandauAnalytics {
    inner: Analytics,
}

#[pymethods]
impl LandauAnalytics {
    #[new]
    #[pyo3(signature = (alpha, u0 = 0.0))]
    fn new(alpha: f64, u0: f64) -> PyResult<Self> {
        Ok(Self { inner: Analytics::new(alpha, u0).map_err(to_py)? })
    }

    #[getter]
    fn magnetic_length(&self) -> f64 {
        self.inner.magnetic_length()
    }

    #[getter]
    fn cyclotron(&self) -> f64 {
        self.inner.cyclotron()
    }

    #[getter]
    fn landau_voltage(&self) -> f64 {
        self.inner.landau_voltage()
    }

    #[getter]
    fn hall_speed(&self) -> f64 {
        self.inner.hall_speed()
    }

    fn level(&self, ell: usize) -> f64 {
        self.inner.level(ell)
    }

    fn channel_frequency(&self, x: f64) -> f64 {
        self.inner.channel_frequency(x)
    }

    fn analytic_spectrum_at_x(&self, ell: usize, x: f64) -> f64 {
        self.inner.analytic_spectrum_at_x(ell, x)
    }
}

#[pyfunction]
fn presets() -> Vec<&'static str> {
    hrun::preset_names().collect()
}

#[pyfunction]
fn preset_text(name: &str) -> PyResult<&'static str> {
    hrun::preset_text(name).map_err(to_py)
}

/// Run a configuration without touching the file system.
#[pyfunction]
#[pyo3(signature = (config, jobs = None))]
fn execute(py: Python<'_>, config: &Config, jobs: Option<usize>) -> PyResult<Artifacts> {
    let cfg = config.inner.config.clone();
    let inner = py.detach(move || hrun::with_jobs(jobs, || hrun::execute(&cfg))).map_err(to_py)?;
    Ok(Artifacts { inner })
}

/// Run a configuration, write its outputs into `out_dir` and return the manifest.
#[pyfunction]
#[pyo3(signature = (config, out_dir, jobs = None))]
fn run<'py>(py: Python<'py>, config: &Config, out_dir: PathBuf, jobs: Option<usize>) -> PyResult<Bound<'py, PyAny>> {
    let parsed = config.inner.clone();
    let m = py.detach(move || hrun::run(&parsed, &out_dir, jobs)).map_err(to_py)?;
    json_to_py(py, &m.to_json())
}

/// Load a manifest, checking its derived quantities.
#[pyfunction]
fn load_manifest(py: Python<'_>, path: PathBuf) -> PyResult<Bound<'_, PyAny>> {
    let m = hrun::load_manifest(&path).map_err(to_py)?;
    json_to_py(py, &m.to_json())
}

#[pyfunction]
fn read_snapshots(path: PathBuf) -> PyResult<Snapshots> {
    Ok(Snapshots { inner: hrun::read_snapshots(&path).map_err(to_py)? })
}

/// Markovian decay rate of an emitter detuned by `detuning` from the channel.
#[pyfunction]
#[pyo3(signature = (g, alpha, u_b, detuning = 0.0))]
fn markov_rate(g: f64, alpha: f64, u_b: f64, detuning: f64) -> PyResult<f64> {
    rate(g, alpha, u_b, detuning).map_err(to_py)
}

/// `(regime, g sqrt(alpha) / U_B)`.
#[pyfunction]
fn classify_regime(g: f64, alpha: f64, u_b: f64) -> (String, f64) {
    let r = classify(g, alpha, u_b);
    (r.regime.to_string(), r.ratio)
}

/// Sorted eigenfrequencies of the bare lattice with a linear potential.
#[pyfunction]
#[pyo3(signature = (nx, ny, alpha, u0 = 0.0, bc_x = "open", bc_y = "open"))]
fn spectrum(py: Python<'_>, nx: usize, ny: usize, alpha: f64, u0: f64, bc_x: &str, bc_y: &str) -> PyResult<Vec<f64>> {
    let g = LatticeGeometry::new(nx, ny, boundary(bc_x)?, boundary(bc_y)?).map_err(to_py)?;
    py.detach(move || {
        let (_, h) = build_lattice(&g, alpha, &PotentialSpec::Linear { u0 }, None)?;
        Ok(diagonalize(&h)?.omegas().to_vec())
    })
    .map_err(to_py)
}

#[pymodule]
#[pyo3(name = "hallwave")]
pub fn hallwave_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Config>()?;
    m.add_class::<Artifacts>()?;
    m.add_class::<Snapshots>()?;
    m.add_class::<LandauAnalytics>()?;
    m.add_function(wrap_pyfunction!(presets, m)?)?;
    m.add_function(wrap_pyfunction!(preset_text, m)?)?;
    m.add_function(wrap_pyfunction!(execute, m)?)?;
    m.add_function(wrap_pyfunction!(run, m)?)?;
    m.add_function(wrap_pyfunction!(load_manifest, m)?)?;
    m.add_function(wrap_pyfunction!(read_snapshots, m)?)?;
    m.add_function(wrap_pyfunction!(markov_rate, m)?)?;
    m.add_function(wrap_pyfunction!(classify_regime, m)?)?;
    m.add_function(wrap_pyfunction!(spectrum, m)?)?;
    Ok(())
}
