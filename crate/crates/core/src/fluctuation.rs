//! The energy-fluctuation relation
//!
//! ```text
//! <eps>^2 = T^2 d<eps>/dT + (omega/2)^2
//! ```
//!
//! read as an ODE in the temperature. Its solution selected by
//! `<eps> -> omega/2` as `T -> 0` is `(omega/2) coth(omega/2T)`.

use crate::error::{domain, Error, Result};
use crate::spectra;

/// d<eps>/dT of the coth solution: (omega/2T)^2 / sinh^2(omega/2T).
pub fn mean_energy_derivative(omega: f64, temperature: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return domain(format!("temperature must be positive, got {temperature}"));
    }
    spectra::mean_energy(omega, temperature)?;
    let y = omega / (2.0 * temperature);
    let s = y.sinh();
    Ok(y * y / (s * s))
}

fn residual_of(omega: f64, temperature: f64, eps: f64, deriv: f64) -> f64 {
    let half = 0.5 * omega;
    let rhs = temperature * temperature * deriv + half * half;
    (eps * eps - rhs).abs() / (eps * eps)
}

/// Relative residual of the fluctuation relation for the coth solution,
/// using the closed-form derivative.
pub fn variance_residual(omega: f64, temperature: f64) -> Result<f64> {
    let deriv = mean_energy_derivative(omega, temperature)?;
    let eps = spectra::mean_energy(omega, temperature)?;
    Ok(residual_of(omega, temperature, eps, deriv))
}

/// As [`variance_residual`] but with a central difference of step
/// `rel_step * T` for the derivative.
pub fn variance_residual_fd(omega: f64, temperature: f64, rel_step: f64) -> Result<f64> {
    if !(temperature > 0.0) {
        return domain(format!("temperature must be positive, got {temperature}"));
    }
    if !(rel_step > 0.0 && rel_step < 1.0) {
        return domain(format!("relative step must lie in (0, 1), got {rel_step}"));
    }
    let h = rel_step * temperature;
    let up = spectra::mean_energy(omega, temperature + h)?;
    let down = spectra::mean_energy(omega, temperature - h)?;
    let eps = spectra::mean_energy(omega, temperature)?;
    Ok(residual_of(omega, temperature, eps, (up - down) / (2.0 * h)))
}

/// Settings for [`solve_mean_energy`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OdeSolveConfig {
    pub t_start: f64,
    pub t_end: f64,
    /// <eps> at `t_start`.
    pub initial_energy: f64,
    /// Local relative error tolerance of the adaptive stepper.
    pub rel_tol: f64,
}

impl OdeSolveConfig {
    /// Starts on the low-temperature asymptote omega/2 + omega e^{-omega/T_start}.
    pub fn asymptotic(omega: f64, t_start: f64, t_end: f64, rel_tol: f64) -> Self {
        Self {
            t_start,
            t_end,
            initial_energy: 0.5 * omega + omega * (-omega / t_start).exp(),
            rel_tol,
        }
    }

    fn validate(&self, omega: f64) -> Result<()> {
        if !(omega > 0.0) {
            return domain(format!("omega must be positive, got {omega}"));
        }
        if !(self.t_start > 0.0 && self.t_end > self.t_start) || !self.t_end.is_finite() {
            return domain(format!(
                "need 0 < T_start < T_end, got T_start = {}, T_end = {}",
                self.t_start, self.t_end
            ));
        }
        if !(self.rel_tol > 0.0) {
            return domain(format!("rel_tol must be positive, got {}", self.rel_tol));
        }
        if !self.initial_energy.is_finite() {
            return domain("initial energy must be finite");
        }
        if self.initial_energy < 0.5 * omega {
            return Err(Error::Unphysical {
                temperature: self.t_start,
                energy: self.initial_energy,
            });
        }
        Ok(())
    }
}

/// Accepted steps of an ODE solve.
#[derive(Debug, Clone, PartialEq)]
pub struct OdeSolution {
    /// (T, <eps>) pairs, starting at T_start and ending at T_end.
    pub points: Vec<(f64, f64)>,
    /// Propagated bound on the absolute error of the final <eps>.
    pub error_estimate: f64,
    pub rejected_steps: usize,
}

impl OdeSolution {
    pub fn final_energy(&self) -> f64 {
        self.points.last().map(|p| p.1).unwrap_or(f64::NAN)
    }
}

// Dormand-Prince 5(4) tableau.
const C: [f64; 7] = [0.0, 1.0 / 5.0, 3.0 / 10.0, 4.0 / 5.0, 8.0 / 9.0, 1.0, 1.0];
const A: [[f64; 6]; 7] = [
    [0.0; 6],
    [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
    [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
    [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
    [19372.0 / 6561.0, -25360.0 / 2187.0, 64448.0 / 6561.0, -212.0 / 729.0, 0.0, 0.0],
    [9017.0 / 3168.0, -355.0 / 33.0, 46732.0 / 5247.0, 49.0 / 176.0, -5103.0 / 18656.0, 0.0],
    [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0],
];
const B5: [f64; 7] = [35.0 / 384.0, 0.0, 500.0 / 1113.0, 125.0 / 192.0, -2187.0 / 6784.0, 11.0 / 84.0, 0.0];
const B4: [f64; 7] = [
    5179.0 / 57600.0,
    0.0,
    7571.0 / 16695.0,
    393.0 / 640.0,
    -92097.0 / 339200.0,
    187.0 / 2100.0,
    1.0 / 40.0,
];

/// Integrates d<eps>/dT = (<eps>^2 - (omega/2)^2) / T^2 from `T_start`.
///
/// The state is the thermal excess u = <eps> - omega/2 so the tiny
/// low-temperature values keep full relative precision; the right-hand
/// side u (u + omega) / T^2 is the same ODE. Steps whose error cannot be
/// controlled, including finite-temperature blow-ups of perturbed
/// solutions, end in [`Error::StepUnderflow`].
pub fn solve_mean_energy(omega: f64, cfg: &OdeSolveConfig) -> Result<OdeSolution> {
    cfg.validate(omega)?;
    let half = 0.5 * omega;
    let rhs = |t: f64, u: f64| u * (u + omega) / (t * t);

    let mut t = cfg.t_start;
    let mut u = cfg.initial_energy - half;
    let mut points = vec![(t, cfg.initial_energy)];
    let mut global_err = 0.0;
    let mut rejected = 0;
    // the solution varies on the scale T^2 / omega at low T
    let mut h = (1e-2 * t * t / omega).min(cfg.t_end - t);
    let mut k = [0.0; 7];

    while t < cfg.t_end {
        h = h.min(cfg.t_end - t);
        if h <= 1e-14 * t {
            return Err(Error::StepUnderflow { temperature: t, step: h });
        }
        k[0] = rhs(t, u);
        for s in 1..7 {
            let y = u + h * (0..s).map(|j| A[s][j] * k[j]).sum::<f64>();
            k[s] = rhs(t + C[s] * h, y);
        }
        let u5 = u + h * (0..7).map(|j| B5[j] * k[j]).sum::<f64>();
        let u4 = u + h * (0..7).map(|j| B4[j] * k[j]).sum::<f64>();
        let local = (u5 - u4).abs();
        let scale = cfg.rel_tol * u.abs().max(u5.abs()) + f64::MIN_POSITIVE;
        let ratio = if u5.is_finite() { local / scale } else { f64::INFINITY };

        if ratio <= 1.0 {
            if u5 < 0.0 {
                return Err(Error::Unphysical {
                    temperature: t + h,
                    energy: half + u5,
                });
            }
            // linearized growth exp(h df/du) of earlier errors across the step
            let growth = (h * (2.0 * u.max(u5) + omega) / (t * t)).exp();
            global_err = global_err * growth + local;
            t = if cfg.t_end - (t + h) < 1e-15 * cfg.t_end { cfg.t_end } else { t + h };
            u = u5;
            points.push((t, half + u));
            let grow = if ratio == 0.0 { 5.0 } else { (0.9 * ratio.powf(-0.2)).clamp(0.2, 5.0) };
            h *= grow;
        } else {
            rejected += 1;
            let shrink = if ratio.is_finite() { (0.9 * ratio.powf(-0.25)).clamp(0.1, 0.9) } else { 0.1 };
            h *= shrink;
        }
    }

    Ok(OdeSolution {
        points,
        error_estimate: global_err,
        rejected_steps: rejected,
    })
}
