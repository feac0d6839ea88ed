//! Python bindings. Densities are passed as `SpectralDensity` objects,
//! oscillators as `OscillatorParams`; statistics come back as dicts.

use std::collections::HashMap;
use std::sync::Arc;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

use sedplanck::counting::{self, EnergyPartition};
use sedplanck::fieldsynth::{self, ModeGrid, WeightMode};
use sedplanck::{fluctuation, oscsim, resonance, spectra, thermo};

fn to_py(e: sedplanck::Error) -> PyErr {
    match e {
        sedplanck::Error::Domain(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn weight_mode(name: &str) -> PyResult<WeightMode> {
    match name {
        "flat" => Ok(WeightMode::FlatSimplex),
        "field" => Ok(WeightMode::FieldEnergy),
        _ => Err(PyValueError::new_err(format!("unknown weight mode '{name}', expected 'flat' or 'field'"))),
    }
}

#[pyclass(name = "SpectralDensity", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySpectralDensity(spectra::SpectralDensity);

#[pymethods]
impl PySpectralDensity {
    #[staticmethod]
    fn zeropoint() -> Self {
        Self(spectra::SpectralDensity::Zeropoint)
    }

    #[staticmethod]
    fn thermal(temperature: f64) -> PyResult<Self> {
        spectra::SpectralDensity::thermal(temperature).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn total(temperature: f64) -> PyResult<Self> {
        spectra::SpectralDensity::total(temperature).map(Self).map_err(to_py)
    }

    /// Piecewise-linear density through the given nodes.
    #[staticmethod]
    fn tabulated(omegas: Vec<f64>, values: Vec<f64>) -> PyResult<Self> {
        spectra::TabulatedDensity::new(omegas, values)
            .map(|t| Self(spectra::SpectralDensity::Tabulated(t)))
            .map_err(to_py)
    }

    fn __call__(&self, omega: f64) -> PyResult<f64> {
        self.0.eval(omega).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        match &self.0 {
            spectra::SpectralDensity::Zeropoint => "SpectralDensity.zeropoint()".into(),
            spectra::SpectralDensity::Thermal { temperature } => format!("SpectralDensity.thermal({temperature})"),
            spectra::SpectralDensity::Total { temperature } => format!("SpectralDensity.total({temperature})"),
            spectra::SpectralDensity::Tabulated(t) => format!("SpectralDensity.tabulated(range={:?})", t.range()),
        }
    }
}

#[pyclass(name = "OscillatorParams", frozen, skip_from_py_object)]
#[derive(Clone, Copy)]
struct PyOscillatorParams(sedplanck::OscillatorParams);

#[pymethods]
impl PyOscillatorParams {
    #[new]
    fn new(mass: f64, charge: f64, omega: f64) -> PyResult<Self> {
        sedplanck::OscillatorParams::new(mass, charge, omega).map(Self).map_err(to_py)
    }

    #[staticmethod]
    fn from_tau(omega: f64, tau: f64) -> PyResult<Self> {
        sedplanck::OscillatorParams::from_tau(omega, tau).map(Self).map_err(to_py)
    }

    #[getter]
    fn tau(&self) -> f64 {
        self.0.tau()
    }

    #[getter]
    fn omega(&self) -> f64 {
        self.0.omega()
    }

    #[getter]
    fn damping_rate(&self) -> f64 {
        self.0.damping_rate()
    }

    /// Resonance integral for the mean energy: dict with value, error, evals.
    #[pyo3(signature = (density, cutoff_ratio = 100.0, rel_tol = 1e-10))]
    fn mean_energy_integral(
        &self,
        py: Python<'_>,
        density: &PySpectralDensity,
        cutoff_ratio: f64,
        rel_tol: f64,
    ) -> PyResult<HashMap<&'static str, f64>> {
        let mut cfg = sedplanck::QuadratureConfig::for_oscillator(&self.0);
        cfg.omega_max = cutoff_ratio * self.0.omega();
        cfg.rel_tol = rel_tol;
        let rho = density.0.clone();
        let p = self.0;
        let r = py.detach(|| resonance::mean_energy_integral(&p, &rho, &cfg)).map_err(to_py)?;
        Ok(HashMap::from([("value", r.value), ("error", r.error), ("evals", r.evals as f64)]))
    }

    fn narrow_resonance_value(&self, density: &PySpectralDensity) -> PyResult<f64> {
        resonance::narrow_resonance_value(&self.0, &density.0).map_err(to_py)
    }

    fn __repr__(&self) -> String {
        format!(
            "OscillatorParams(mass={}, charge={}, omega={})",
            self.0.mass(),
            self.0.charge(),
            self.0.omega()
        )
    }
}

#[pyfunction]
fn rho_zeropoint(omega: f64) -> PyResult<f64> {
    spectra::rho_zeropoint(omega).map_err(to_py)
}

#[pyfunction]
fn rho_thermal(omega: f64, temperature: f64) -> PyResult<f64> {
    spectra::rho_thermal(omega, temperature).map_err(to_py)
}

#[pyfunction]
fn rho_total(omega: f64, temperature: f64) -> PyResult<f64> {
    spectra::rho_total(omega, temperature).map_err(to_py)
}

#[pyfunction]
fn mean_energy(omega: f64, temperature: f64) -> PyResult<f64> {
    spectra::mean_energy(omega, temperature).map_err(to_py)
}

#[pyfunction]
fn mean_thermal_energy(omega: f64, temperature: f64) -> PyResult<f64> {
    spectra::mean_thermal_energy(omega, temperature).map_err(to_py)
}

#[pyfunction]
fn variance_residual(omega: f64, temperature: f64) -> PyResult<f64> {
    fluctuation::variance_residual(omega, temperature).map_err(to_py)
}

/// (T, <eps>) pairs of the numerical solution started on the
/// low-temperature asymptote, or at `initial` when given.
#[pyfunction]
#[pyo3(signature = (omega, t_start, t_end, rel_tol = 1e-10, initial = None))]
fn solve_mean_energy(
    omega: f64,
    t_start: f64,
    t_end: f64,
    rel_tol: f64,
    initial: Option<f64>,
) -> PyResult<Vec<(f64, f64)>> {
    let mut cfg = fluctuation::OdeSolveConfig::asymptotic(omega, t_start, t_end, rel_tol);
    if let Some(e) = initial {
        cfg.initial_energy = e;
    }
    fluctuation::solve_mean_energy(omega, &cfg).map(|s| s.points).map_err(to_py)
}

#[pyfunction]
fn entropy_star(r: f64) -> PyResult<f64> {
    thermo::entropy_star(r).map_err(to_py)
}

#[pyfunction]
fn caloric_entropy(mean_thermal_energy: f64, omega: f64) -> PyResult<f64> {
    thermo::caloric_entropy(mean_thermal_energy, omega).map_err(to_py)
}

#[pyfunction]
fn inverse_temperature(mean_energy: f64, omega: f64) -> PyResult<f64> {
    thermo::inverse_temperature(mean_energy, omega).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (oscillators, temperature, trials, seed, omega = 1.0))]
fn thermodynamic_limit(
    py: Python<'_>,
    oscillators: u64,
    temperature: f64,
    trials: u64,
    seed: u64,
    omega: f64,
) -> PyResult<HashMap<&'static str, f64>> {
    let cfg = thermo::ThermoLimitConfig::new(oscillators, omega, temperature, trials, seed);
    let r = py.detach(|| thermo::thermodynamic_limit_run(&cfg)).map_err(to_py)?;
    Ok(HashMap::from([
        ("mean_q", r.mean_q),
        ("spread_q", r.spread_q),
        ("s_star_error", r.s_star_error),
        ("s_star_error_naive", r.s_star_error_naive),
        ("resampled", r.resampled as f64),
    ]))
}

/// N! (A-1)! / (N+A-1)! as (probability, log_probability).
#[pyfunction]
fn probability_exact(oscillators: u64, fractions: u64) -> PyResult<(f64, f64)> {
    counting::probability_exact(oscillators, fractions)
        .map(|r| (r.probability, r.log_probability))
        .map_err(to_py)
}

/// Monte Carlo estimate as (probability, standard error).
#[pyfunction]
#[pyo3(signature = (occupations, samples, seed, weights = "flat"))]
fn probability_mc(
    py: Python<'_>,
    occupations: Vec<f64>,
    samples: u64,
    seed: u64,
    weights: &str,
) -> PyResult<(f64, f64)> {
    let mode = weight_mode(weights)?;
    let partition = EnergyPartition::from_occupations(occupations, 1.0).map_err(to_py)?;
    let r = py
        .detach(|| counting::probability_mc(&partition, samples, seed, mode))
        .map_err(to_py)?;
    Ok((r.probability, r.std_error.unwrap_or(f64::NAN)))
}

#[pyfunction]
fn partition_from_energies(energies: Vec<f64>, fractions: u64) -> PyResult<(f64, Vec<f64>)> {
    counting::partition_from_energies(&energies, fractions)
        .map(|p| (p.fraction_size(), p.occupations().to_vec()))
        .map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (count, seed, weights = "flat"))]
fn sample_weights(count: usize, seed: u64, weights: &str) -> PyResult<Vec<f64>> {
    fieldsynth::sample_weights(count, weight_mode(weights)?, seed)
        .map(|w| w.alphas().to_vec())
        .map_err(to_py)
}

/// Ensemble field correlation on `times` as (values, std_errors, model).
#[pyfunction]
fn field_correlation(
    py: Python<'_>,
    density: &PySpectralDensity,
    omega_max: f64,
    modes: usize,
    realizations: usize,
    seed: u64,
    times: Vec<f64>,
) -> PyResult<(Vec<f64>, Vec<f64>, Vec<f64>)> {
    let rho = density.0.clone();
    py.detach(|| {
        let grid = Arc::new(ModeGrid::new(&rho, 0.0, omega_max, modes)?);
        let c = fieldsynth::correlation_ensemble(&grid, seed, realizations, &times)?;
        let model = times
            .iter()
            .map(|&t| fieldsynth::correlation_model(&rho, omega_max, t))
            .collect::<sedplanck::Result<Vec<_>>>()?;
        Ok((c.values, c.std_errors, model))
    })
    .map_err(to_py)
}

/// Driven-oscillator ensemble with default settings apart from the
/// arguments given; returns the energy statistics as a dict.
#[pyfunction]
#[pyo3(signature = (params, density, realizations, seed, measure_widths = 100.0))]
fn simulate_ensemble(
    py: Python<'_>,
    params: &PyOscillatorParams,
    density: &PySpectralDensity,
    realizations: usize,
    seed: u64,
    measure_widths: f64,
) -> PyResult<HashMap<&'static str, f64>> {
    let mut cfg = oscsim::SimConfig::new(params.0, seed);
    cfg.n_realizations = realizations;
    cfg.t_measure = measure_widths / params.0.damping_rate();
    let rho = density.0.clone();
    let s = py.detach(|| oscsim::simulate_ensemble(&cfg, &rho)).map_err(to_py)?;
    Ok(HashMap::from([
        ("mean", s.mean),
        ("variance", s.variance),
        ("mean_std_error", s.mean_std_error),
        ("variance_std_error", s.variance_std_error),
        ("kinetic_mean", s.kinetic_mean),
        ("potential_mean", s.potential_mean),
        ("n_samples", s.n_samples as f64),
        ("dt", s.dt),
    ]))
}

#[pymodule]
fn pysedplanck(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpectralDensity>()?;
    m.add_class::<PyOscillatorParams>()?;
    m.add_function(wrap_pyfunction!(rho_zeropoint, m)?)?;
    m.add_function(wrap_pyfunction!(rho_thermal, m)?)?;
    m.add_function(wrap_pyfunction!(rho_total, m)?)?;
    m.add_function(wrap_pyfunction!(mean_energy, m)?)?;
    m.add_function(wrap_pyfunction!(mean_thermal_energy, m)?)?;
    m.add_function(wrap_pyfunction!(variance_residual, m)?)?;
    m.add_function(wrap_pyfunction!(solve_mean_energy, m)?)?;
    m.add_function(wrap_pyfunction!(entropy_star, m)?)?;
    m.add_function(wrap_pyfunction!(caloric_entropy, m)?)?;
    m.add_function(wrap_pyfunction!(inverse_temperature, m)?)?;
    m.add_function(wrap_pyfunction!(thermodynamic_limit, m)?)?;
    m.add_function(wrap_pyfunction!(probability_exact, m)?)?;
    m.add_function(wrap_pyfunction!(probability_mc, m)?)?;
    m.add_function(wrap_pyfunction!(partition_from_energies, m)?)?;
    m.add_function(wrap_pyfunction!(sample_weights, m)?)?;
    m.add_function(wrap_pyfunction!(field_correlation, m)?)?;
    m.add_function(wrap_pyfunction!(simulate_ensemble, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
