//! Mean energy of a radiatively damped charged oscillator as a resonance
//! integral over the spectral density:
//!
//! ```text
//! <eps> = (4 pi / 3) (e^2 / m) omega^2  int_0^omega_max  rho(w) dw
//!         / [ (w^2 - omega^2)^2 + ((2/3)(e^2/m) w^3)^2 ]
//! ```
//!
//! For small damping ratio tau = (2/3) e^2 omega / m the peak is so narrow
//! that the integral collapses to pi^2 rho(omega) / omega^2.

use std::f64::consts::PI;

use crate::error::{domain, Error, Result};
use crate::quadrature::{self, Tolerance};
use crate::spectra::SpectralDensity;

/// Damping ratios at or above this are rejected.
pub const MAX_TAU: f64 = 1e-2;
/// Damping ratios above this log a warning.
pub const WARN_TAU: f64 = 1e-3;

/// A one-dimensional charged oscillator. The damping ratio is derived from
/// mass, charge and frequency and cannot be set independently.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OscillatorParams {
    mass: f64,
    charge: f64,
    omega: f64,
}

impl OscillatorParams {
    pub fn new(mass: f64, charge: f64, omega: f64) -> Result<Self> {
        if !(mass > 0.0) || !mass.is_finite() {
            return domain(format!("oscillator mass must be positive, got {mass}"));
        }
        if !(omega > 0.0) || !omega.is_finite() {
            return domain(format!("oscillator frequency must be positive, got {omega}"));
        }
        if charge == 0.0 || !charge.is_finite() {
            return domain(format!("oscillator charge must be finite and nonzero, got {charge}"));
        }
        let params = Self { mass, charge, omega };
        let tau = params.tau();
        if tau >= MAX_TAU {
            return domain(format!(
                "damping ratio tau = {tau:e} violates tau << 1 (must be < {MAX_TAU:e})"
            ));
        }
        if tau > WARN_TAU {
            log::warn!("damping ratio tau = {tau:e} is large; narrow-resonance errors are O(tau)");
        }
        Ok(params)
    }

    /// Unit-mass oscillator whose charge is chosen to give the damping ratio `tau`.
    pub fn from_tau(omega: f64, tau: f64) -> Result<Self> {
        if !(tau > 0.0) {
            return domain(format!("damping ratio must be positive, got {tau}"));
        }
        if !(omega > 0.0) {
            return domain(format!("oscillator frequency must be positive, got {omega}"));
        }
        Self::new(1.0, (1.5 * tau / omega).sqrt(), omega)
    }

    pub fn mass(&self) -> f64 {
        self.mass
    }

    pub fn charge(&self) -> f64 {
        self.charge
    }

    pub fn omega(&self) -> f64 {
        self.omega
    }

    /// (2/3) e^2 / m, the coefficient of the radiation-reaction term.
    pub fn radiation_coefficient(&self) -> f64 {
        2.0 / 3.0 * self.charge * self.charge / self.mass
    }

    /// tau = (2/3) e^2 omega / m.
    pub fn tau(&self) -> f64 {
        self.radiation_coefficient() * self.omega
    }

    /// Linear damping rate gamma = (2/3)(e^2/m) omega^2 = tau omega. This is
    /// also the full width at half maximum of the resonance peak in omega'.
    pub fn damping_rate(&self) -> f64 {
        self.tau() * self.omega
    }
}

/// Settings for [`mean_energy_integral`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureConfig {
    /// Upper cutoff of the frequency integral.
    pub omega_max: f64,
    /// Half-size of the fine window around omega, in units of the damping
    /// rate gamma.
    pub wing_halfwidths: f64,
    pub rel_tol: f64,
    pub max_evals: usize,
}

impl QuadratureConfig {
    pub const DEFAULT_WING_HALFWIDTHS: f64 = 50.0;
    pub const DEFAULT_CUTOFF_RATIO: f64 = 100.0;

    /// Cutoff at 100 omega, a 50-width window and relative tolerance 1e-10.
    pub fn for_oscillator(params: &OscillatorParams) -> Self {
        Self {
            omega_max: Self::DEFAULT_CUTOFF_RATIO * params.omega(),
            wing_halfwidths: Self::DEFAULT_WING_HALFWIDTHS,
            rel_tol: 1e-10,
            max_evals: 2_000_000,
        }
    }

    fn validate(&self, params: &OscillatorParams) -> Result<()> {
        if !(self.omega_max > params.omega()) || !self.omega_max.is_finite() {
            return domain(format!(
                "omega_max = {} must exceed the oscillator frequency {}",
                self.omega_max,
                params.omega()
            ));
        }
        if !(self.rel_tol > 0.0) {
            return domain(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if !(self.wing_halfwidths > 0.0) {
            return domain("wing_halfwidths must be positive");
        }
        Ok(())
    }
}

/// A quadrature result with its estimated absolute error.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResonanceIntegral {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

impl ResonanceIntegral {
    pub fn relative_error(&self) -> f64 {
        if self.value == 0.0 {
            0.0
        } else {
            self.error / self.value.abs()
        }
    }
}

fn breakpoints(params: &OscillatorParams, density: &SpectralDensity, cfg: &QuadratureConfig) -> Vec<f64> {
    let omega = params.omega();
    let gamma = params.damping_rate();
    let mut breaks = vec![0.0, omega, cfg.omega_max];
    // geometric ladder from gamma/2 out to the window edge on both sides
    let mut offset = 0.5 * gamma;
    loop {
        let reached_edge = offset >= cfg.wing_halfwidths * gamma;
        let step = offset.min(cfg.wing_halfwidths * gamma);
        breaks.push(omega - step);
        breaks.push(omega + step);
        if reached_edge {
            break;
        }
        offset *= 4.0;
    }
    breaks.extend(density.breakpoints(0.0, cfg.omega_max));
    breaks.retain(|&w| w >= 0.0 && w <= cfg.omega_max);
    breaks.sort_by(f64::total_cmp);
    breaks.dedup();
    breaks
}

/// Evaluates the resonance integral for the mean oscillator energy.
///
/// Runs out of budget with [`Error::QuadratureBudget`]; a density that is
/// not defined on `[0, omega_max]` is a domain error.
pub fn mean_energy_integral(
    params: &OscillatorParams,
    density: &SpectralDensity,
    cfg: &QuadratureConfig,
) -> Result<ResonanceIntegral> {
    cfg.validate(params)?;
    density.check_support(0.0, cfg.omega_max)?;

    let omega = params.omega();
    let kappa = params.radiation_coefficient();
    let prefactor = 2.0 * PI * kappa * omega * omega;

    let mut failure = None;
    let integrand = |w: f64| {
        let rho = match density.eval(w) {
            Ok(v) => v,
            Err(e) => {
                failure.get_or_insert(e);
                return 0.0;
            }
        };
        if rho == 0.0 {
            return 0.0;
        }
        // factored so the detuning keeps its relative precision on resonance
        let detune = (w - omega) * (w + omega);
        let width = kappa * w * w * w;
        rho / (detune * detune + width * width)
    };

    let breaks = breakpoints(params, density, cfg);
    let tol = Tolerance {
        rel: cfg.rel_tol,
        abs: 0.0,
        max_evals: cfg.max_evals,
    };
    let result = quadrature::integrate(integrand, &breaks, tol);
    if let Some(e) = failure {
        return Err(e);
    }
    match result {
        Ok(est) => Ok(ResonanceIntegral {
            value: prefactor * est.value,
            error: prefactor * est.error,
            evals: est.evals,
        }),
        Err(Error::QuadratureBudget {
            estimate,
            error,
            requested,
            evals,
        }) => Err(Error::QuadratureBudget {
            estimate: prefactor * estimate,
            error: prefactor * error,
            requested: prefactor * requested,
            evals,
        }),
        Err(e) => Err(e),
    }
}

/// The on-resonance value pi^2 rho(omega) / omega^2.
pub fn narrow_resonance_value(params: &OscillatorParams, density: &SpectralDensity) -> Result<f64> {
    let omega = params.omega();
    Ok(PI * PI * density.eval(omega)? / (omega * omega))
}

/// Relative deviation of the full integral from the narrow-resonance value.
/// Scales as O(tau).
pub fn narrow_resonance_error(
    params: &OscillatorParams,
    density: &SpectralDensity,
    cfg: &QuadratureConfig,
) -> Result<f64> {
    let narrow = narrow_resonance_value(params, density)?;
    if narrow == 0.0 {
        return domain("narrow-resonance value is zero; relative error undefined");
    }
    let integral = mean_energy_integral(params, density, cfg)?;
    Ok((integral.value - narrow).abs() / narrow)
}
