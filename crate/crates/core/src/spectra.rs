//! Spectral densities of the zeropoint and thermal radiation fields and the
//! mean energy of a matter oscillator in equilibrium with them.
//!
//! Natural units throughout: hbar = c = k_B = 1. A spectral density then
//! scales as omega^3 and frequency, energy and temperature share one unit.

use std::f64::consts::PI;

use crate::error::{domain, Result};

/// An (omega, T) pair together with the Wien variable x = omega / T.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoState {
    omega: f64,
    temperature: f64,
}

impl ThermoState {
    pub fn new(omega: f64, temperature: f64) -> Result<Self> {
        if !(omega > 0.0 && omega.is_finite()) {
            return domain(format!("omega must be positive and finite, got {omega}"));
        }
        if !(temperature >= 0.0) || temperature.is_nan() {
            return domain(format!("temperature must be >= 0, got {temperature}"));
        }
        Ok(Self { omega, temperature })
    }

    /// State at unit frequency with the given x = omega / T.
    pub fn from_ratio(x: f64) -> Result<Self> {
        if !(x > 0.0) {
            return domain(format!("x = omega/T must be positive, got {x}"));
        }
        Self::new(1.0, 1.0 / x)
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    pub fn temperature(&self) -> f64 {
        self.temperature
    }

    /// omega / T, +infinity at T = 0.
    pub fn x(&self) -> f64 {
        if self.temperature == 0.0 {
            f64::INFINITY
        } else {
            self.omega / self.temperature
        }
    }

    pub fn mean_energy(&self) -> f64 {
        mean_energy_unchecked(self.omega, self.temperature)
    }

    pub fn mean_thermal_energy(&self) -> f64 {
        mean_thermal_unchecked(self.omega, self.temperature)
    }
}

/// A tabulated spectral density, linearly interpolated in omega.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedDensity {
    omegas: Vec<f64>,
    values: Vec<f64>,
}

impl TabulatedDensity {
    /// The grid must be strictly increasing with at least two nodes and
    /// every value must be non-negative.
    pub fn new(omegas: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if omegas.len() != values.len() {
            return domain("tabulated density: grid and values differ in length");
        }
        if omegas.len() < 2 {
            return domain("tabulated density needs at least two nodes");
        }
        if omegas[0] < 0.0 || !omegas.iter().all(|w| w.is_finite()) {
            return domain("tabulated density: frequencies must be finite and >= 0");
        }
        if omegas.windows(2).any(|w| w[1] <= w[0]) {
            return domain("tabulated density: grid must be strictly increasing");
        }
        if values.iter().any(|v| !(*v >= 0.0) || !v.is_finite()) {
            return domain("tabulated density: values must be finite and >= 0");
        }
        Ok(Self { omegas, values })
    }

    /// Constant density `value` on [lo, hi].
    pub fn flat(lo: f64, hi: f64, value: f64) -> Result<Self> {
        Self::new(vec![lo, hi], vec![value, value])
    }

    pub fn range(&self) -> (f64, f64) {
        (self.omegas[0], *self.omegas.last().unwrap())
    }

    pub fn nodes(&self) -> impl Iterator<Item = (f64, f64)> + '_ {
        self.omegas.iter().copied().zip(self.values.iter().copied())
    }

    fn eval(&self, omega: f64) -> Result<f64> {
        let (lo, hi) = self.range();
        if omega < lo || omega > hi {
            return domain(format!(
                "tabulated density undefined at omega = {omega} (grid covers [{lo}, {hi}])"
            ));
        }
        // first node strictly greater than omega
        let idx = self.omegas.partition_point(|&w| w <= omega);
        if idx == self.omegas.len() {
            return Ok(*self.values.last().unwrap());
        }
        let (w0, w1) = (self.omegas[idx - 1], self.omegas[idx]);
        let (r0, r1) = (self.values[idx - 1], self.values[idx]);
        let s = (omega - w0) / (w1 - w0);
        Ok(r0 + s * (r1 - r0))
    }
}

/// Energy density per unit angular frequency of a radiation field.
#[derive(Debug, Clone, PartialEq)]
pub enum SpectralDensity {
    /// omega^3 / (2 pi^2)
    Zeropoint,
    /// Planck thermal part omega^3 / (pi^2 (e^{omega/T} - 1)).
    Thermal { temperature: f64 },
    /// Zeropoint plus thermal: omega^3 coth(omega/2T) / (2 pi^2).
    Total { temperature: f64 },
    Tabulated(TabulatedDensity),
}

impl SpectralDensity {
    pub fn thermal(temperature: f64) -> Result<Self> {
        check_temperature(temperature)?;
        Ok(Self::Thermal { temperature })
    }

    pub fn total(temperature: f64) -> Result<Self> {
        check_temperature(temperature)?;
        Ok(Self::Total { temperature })
    }

    /// rho(omega). Negative frequencies and points off a tabulated grid
    /// are domain errors.
    pub fn eval(&self, omega: f64) -> Result<f64> {
        if !(omega >= 0.0) {
            return domain(format!("spectral density needs omega >= 0, got {omega}"));
        }
        Ok(match self {
            Self::Zeropoint => zeropoint_unchecked(omega),
            Self::Thermal { temperature } => thermal_unchecked(omega, *temperature),
            Self::Total { temperature } => total_unchecked(omega, *temperature),
            Self::Tabulated(tab) => tab.eval(omega)?,
        })
    }

    /// Checks that the density is defined on all of [lo, hi].
    pub fn check_support(&self, lo: f64, hi: f64) -> Result<()> {
        if lo < 0.0 {
            return domain(format!("spectral density needs omega >= 0, got {lo}"));
        }
        if let Self::Tabulated(tab) = self {
            let (a, b) = tab.range();
            if lo < a || hi > b {
                return domain(format!(
                    "tabulated density covers [{a}, {b}] but [{lo}, {hi}] is required"
                ));
            }
        }
        Ok(())
    }

    /// Frequencies where a tabulated density has kinks, inside (lo, hi).
    pub(crate) fn breakpoints(&self, lo: f64, hi: f64) -> Vec<f64> {
        match self {
            Self::Tabulated(tab) => tab
                .omegas
                .iter()
                .copied()
                .filter(|&w| w > lo && w < hi)
                .collect(),
            _ => Vec::new(),
        }
    }
}

fn check_temperature(temperature: f64) -> Result<()> {
    if !(temperature >= 0.0) || !temperature.is_finite() {
        return domain(format!("temperature must be finite and >= 0, got {temperature}"));
    }
    Ok(())
}

fn check_state(omega: f64, temperature: f64) -> Result<()> {
    if !(omega > 0.0) || !omega.is_finite() {
        return domain(format!("omega must be positive and finite, got {omega}"));
    }
    check_temperature(temperature)
}

/// 1 / (e^x - 1) with x = omega / T, zero at T = 0.
fn bose_factor(omega: f64, temperature: f64) -> f64 {
    if temperature == 0.0 {
        return 0.0;
    }
    // exp_m1 keeps full precision as x -> 0
    1.0 / (omega / temperature).exp_m1()
}

fn zeropoint_unchecked(omega: f64) -> f64 {
    omega.powi(3) / (2.0 * PI * PI)
}

fn thermal_unchecked(omega: f64, temperature: f64) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    2.0 * zeropoint_unchecked(omega) * bose_factor(omega, temperature)
}

fn total_unchecked(omega: f64, temperature: f64) -> f64 {
    if omega == 0.0 {
        return 0.0;
    }
    zeropoint_unchecked(omega) * (1.0 + 2.0 * bose_factor(omega, temperature))
}

fn mean_thermal_unchecked(omega: f64, temperature: f64) -> f64 {
    omega * bose_factor(omega, temperature)
}

fn mean_energy_unchecked(omega: f64, temperature: f64) -> f64 {
    0.5 * omega + mean_thermal_unchecked(omega, temperature)
}

/// Zeropoint spectral density omega^3 / (2 pi^2).
pub fn rho_zeropoint(omega: f64) -> Result<f64> {
    if !(omega >= 0.0) || !omega.is_finite() {
        return domain(format!("rho_zeropoint needs finite omega >= 0, got {omega}"));
    }
    Ok(zeropoint_unchecked(omega))
}

/// Thermal part of the spectral density.
pub fn rho_thermal(omega: f64, temperature: f64) -> Result<f64> {
    check_state(omega, temperature)?;
    Ok(thermal_unchecked(omega, temperature))
}

/// Total spectral density omega^3 coth(omega/2T) / (2 pi^2).
pub fn rho_total(omega: f64, temperature: f64) -> Result<f64> {
    check_state(omega, temperature)?;
    Ok(total_unchecked(omega, temperature))
}

/// Mean oscillator energy (omega/2) coth(omega/2T) = omega/2 + omega/(e^{omega/T} - 1).
pub fn mean_energy(omega: f64, temperature: f64) -> Result<f64> {
    check_state(omega, temperature)?;
    Ok(mean_energy_unchecked(omega, temperature))
}

/// Thermal share of the mean energy, omega / (e^{omega/T} - 1).
pub fn mean_thermal_energy(omega: f64, temperature: f64) -> Result<f64> {
    check_state(omega, temperature)?;
    Ok(mean_thermal_unchecked(omega, temperature))
}
