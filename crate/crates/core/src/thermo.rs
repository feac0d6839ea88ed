//! Entropy per oscillator, the temperature relation and the thermodynamic
//! limit of the energy-fraction size. Entropies are in units of k_B.

use rand_distr::{Distribution, Normal};

use crate::error::{domain, Result};
use crate::parallel::{map_indexed, stream_rng, MeanVar};
use crate::spectra;

/// (1 + r) ln(1 + r) - r ln r, the Stirling-limit entropy per oscillator
/// with r = N/A (equivalently U / (q A)). r = 0 gives 0 by continuity.
pub fn entropy_star(r: f64) -> Result<f64> {
    if r == 0.0 {
        return Ok(0.0);
    }
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("entropy ratio must be finite and >= 0, got {r}"));
    }
    Ok((1.0 + r) * r.ln_1p() - r * r.ln())
}

/// dS*/dr = ln(1 + 1/r).
pub fn entropy_star_derivative(r: f64) -> Result<f64> {
    if !(r > 0.0) || !r.is_finite() {
        return domain(format!("entropy derivative needs r > 0, got {r}"));
    }
    Ok(r.ln_1p() - r.ln())
}

/// Caloric entropy of an oscillator with mean thermal energy `u`:
/// entropy_star(u / omega).
pub fn caloric_entropy(mean_thermal_energy: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return domain(format!("omega must be positive, got {omega}"));
    }
    if !(mean_thermal_energy >= 0.0) {
        return domain(format!("mean thermal energy must be >= 0, got {mean_thermal_energy}"));
    }
    entropy_star(mean_thermal_energy / omega)
}

/// dS/d<eps> from differentiating [`caloric_entropy`] with respect to
/// the mean energy <eps> = omega/2 + u.
pub fn caloric_entropy_derivative(mean_energy: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return domain(format!("omega must be positive, got {omega}"));
    }
    Ok(entropy_star_derivative((mean_energy - 0.5 * omega) / omega)? / omega)
}

/// 1/T = (1/omega) ln(1 + omega / (<eps> - omega/2)).
pub fn inverse_temperature(mean_energy: f64, omega: f64) -> Result<f64> {
    if !(omega > 0.0) {
        return domain(format!("omega must be positive, got {omega}"));
    }
    let thermal = mean_energy - 0.5 * omega;
    if !(thermal > 0.0) {
        return domain(format!(
            "mean energy {mean_energy} must exceed omega/2 = {}; zero thermal energy has no finite temperature",
            0.5 * omega
        ));
    }
    Ok((omega / thermal).ln_1p() / omega)
}

/// Settings for [`thermodynamic_limit_run`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ThermoLimitConfig {
    /// A, the number of oscillators.
    pub oscillators: u64,
    pub omega: f64,
    pub temperature: f64,
    /// N / A for the naive fraction size q = U / N.
    pub fraction_ratio: f64,
    /// Multiplies the sqrt(A) <u> width of the energy fluctuation; 0
    /// pins U to its mean.
    pub fluctuation_scale: f64,
    pub trials: u64,
    pub seed: u64,
}

impl ThermoLimitConfig {
    pub fn new(oscillators: u64, omega: f64, temperature: f64, trials: u64, seed: u64) -> Self {
        Self {
            oscillators,
            omega,
            temperature,
            fraction_ratio: 1.0,
            fluctuation_scale: 1.0,
            trials,
            seed,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.oscillators < 2 {
            return domain(format!("need A >= 2 oscillators, got {}", self.oscillators));
        }
        if !(self.temperature > 0.0) {
            return domain(format!("temperature must be positive, got {}", self.temperature));
        }
        if !(self.omega > 0.0) {
            return domain(format!("omega must be positive, got {}", self.omega));
        }
        if !(self.fraction_ratio > 0.0) {
            return domain("fraction ratio N/A must be positive");
        }
        if !(self.fluctuation_scale >= 0.0) {
            return domain("fluctuation scale must be >= 0");
        }
        if self.trials < 2 {
            return domain("need at least 2 trials");
        }
        Ok(())
    }
}

/// Statistics of the fraction size over the trials of one run.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LimitReport {
    pub oscillators: u64,
    pub trials: u64,
    /// Mean of q / omega with q = omega U / <U>.
    pub mean_q: f64,
    /// Sample standard deviation of q / omega.
    pub spread_q: f64,
    /// Mean |S*(U/(qA)) - S| with q as above.
    pub s_star_error: f64,
    /// Mean |S*(U/(qA)) - S| with the naive q = U / N.
    pub s_star_error_naive: f64,
    /// Draws rejected because U <= 0.
    pub resampled: u64,
}

const TRIAL_BLOCK: u64 = 4096;

/// Samples U = A<u> + dU with dU ~ Normal(0, sqrt(A) <u>) (redrawn while
/// U <= 0), sets the fraction size to q = omega U / <U> and reports how
/// q/omega is distributed.
pub fn thermodynamic_limit_run(cfg: &ThermoLimitConfig) -> Result<LimitReport> {
    cfg.validate()?;
    let u_mean = spectra::mean_thermal_energy(cfg.omega, cfg.temperature)?;
    if u_mean <= 0.0 {
        return domain("mean thermal energy underflows at this temperature");
    }
    let a = cfg.oscillators as f64;
    let n_fractions = cfg.fraction_ratio * a;
    let big_u_mean = a * u_mean;
    let caloric = caloric_entropy(u_mean, cfg.omega)?;
    let sigma = cfg.fluctuation_scale * a.sqrt() * u_mean;
    let normal = Normal::new(0.0, sigma).map_err(|e| crate::Error::Domain(e.to_string()))?;

    let blocks = cfg.trials.div_ceil(TRIAL_BLOCK);
    let parts = map_indexed(blocks as usize, |b| -> Result<(MeanVar, f64, f64, u64)> {
        let b = b as u64;
        let len = TRIAL_BLOCK.min(cfg.trials - b * TRIAL_BLOCK);
        let mut rng = stream_rng(cfg.seed, b);
        let mut q_stats = MeanVar::default();
        let (mut err, mut err_naive, mut resampled) = (0.0, 0.0, 0u64);
        for _ in 0..len {
            let big_u = loop {
                let u = big_u_mean + normal.sample(&mut rng);
                if u > 0.0 {
                    break u;
                }
                resampled += 1;
            };
            let q = cfg.omega * big_u / big_u_mean;
            q_stats.push(q / cfg.omega);
            err += (entropy_star(big_u / (q * a))? - caloric).abs();
            let q_naive = big_u / n_fractions;
            err_naive += (entropy_star(big_u / (q_naive * a))? - caloric).abs();
        }
        Ok((q_stats, err, err_naive, resampled))
    });
    let parts = parts.into_iter().collect::<Result<Vec<_>>>()?;
    let stats: Vec<MeanVar> = parts.iter().map(|p| p.0).collect();
    let q = MeanVar::merge_all(&stats);
    let n = cfg.trials as f64;
    Ok(LimitReport {
        oscillators: cfg.oscillators,
        trials: cfg.trials,
        mean_q: q.mean,
        spread_q: q.std_dev(),
        s_star_error: parts.iter().map(|p| p.1).sum::<f64>() / n,
        s_star_error_naive: parts.iter().map(|p| p.2).sum::<f64>() / n,
        resampled: parts.iter().map(|p| p.3).sum(),
    })
}

/// Least-squares slope of ln(spread) against ln(A).
pub fn spread_scaling_exponent(reports: &[LimitReport]) -> Result<f64> {
    if reports.len() < 2 {
        return domain("need at least two runs to fit a slope");
    }
    let pts: Vec<(f64, f64)> = reports
        .iter()
        .map(|r| ((r.oscillators as f64).ln(), r.spread_q.ln()))
        .collect();
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return domain("all runs share one oscillator count");
    }
    Ok(sxy / sxx)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn entropy_star_values() {
        assert!((entropy_star(1.0).unwrap() - 2.0 * 2f64.ln()).abs() < 1e-15);
        assert!((entropy_star(1.0).unwrap() - 1.386_294).abs() < 1e-6);
        let r3 = 4.0 * 4f64.ln() - 3.0 * 3f64.ln();
        assert!((entropy_star(3.0).unwrap() - r3).abs() < 1e-14);
        assert!((entropy_star(3.0).unwrap() - 2.249_341).abs() < 1e-6);
        assert_eq!(entropy_star(0.0).unwrap(), 0.0);
        assert!(entropy_star(1e-300).unwrap() < 1e-296);
        assert!(entropy_star(-0.5).is_err());
    }

    #[test]
    fn caloric_values() {
        assert_eq!(caloric_entropy(2.0, 2.0).unwrap(), entropy_star(1.0).unwrap());
        assert_eq!(caloric_entropy(0.0, 1.0).unwrap(), 0.0);
        assert!(caloric_entropy(-1.0, 1.0).is_err());
    }

    #[test]
    fn inverse_temperature_values() {
        assert!((inverse_temperature(1.0, 1.0).unwrap() - 3f64.ln()).abs() < 1e-15);
        assert!((inverse_temperature(2.0, 2.0).unwrap() - 3f64.ln() / 2.0).abs() < 1e-15);
        assert!(inverse_temperature(0.5, 1.0).is_err());
        assert!(inverse_temperature(0.4, 1.0).is_err());
    }

    #[test]
    fn inverse_temperature_round_trip() {
        for t in [0.1, 1.0, 10.0] {
            let eps = spectra::mean_energy(1.0, t).unwrap();
            let beta = inverse_temperature(eps, 1.0).unwrap();
            assert!((beta * t - 1.0).abs() < 1e-12, "T = {t}: {beta}");
        }
    }

    #[test]
    fn entropy_is_increasing_and_concave() {
        let h = 0.01;
        for i in 1..1000 {
            let r = i as f64 * h;
            let (a, b, c) = (
                entropy_star(r - h * 0.5).unwrap(),
                entropy_star(r).unwrap(),
                entropy_star(r + h * 0.5).unwrap(),
            );
            assert!(c > b && b > a);
            assert!(a - 2.0 * b + c < 0.0, "r = {r}");
        }
    }

    #[test]
    fn pinned_energy_gives_exact_omega() {
        let mut cfg = ThermoLimitConfig::new(100, 1.0, 1.0, 50, 2);
        cfg.fluctuation_scale = 0.0;
        let r = thermodynamic_limit_run(&cfg).unwrap();
        assert_eq!(r.mean_q, 1.0);
        assert_eq!(r.spread_q, 0.0);
        assert!(r.s_star_error < 1e-15);
        assert_eq!(r.resampled, 0);
    }

    #[test]
    fn config_validation() {
        assert!(thermodynamic_limit_run(&ThermoLimitConfig::new(1, 1.0, 1.0, 10, 0)).is_err());
        assert!(thermodynamic_limit_run(&ThermoLimitConfig::new(10, 1.0, 0.0, 10, 0)).is_err());
    }

    #[test]
    fn small_systems_resample() {
        // sigma = sqrt(2) <u> puts a visible mass below U = 0
        let r = thermodynamic_limit_run(&ThermoLimitConfig::new(2, 1.0, 1.0, 2000, 5)).unwrap();
        assert!(r.resampled > 0);
    }

    #[test]
    fn slope_fit() {
        let mk = |a: u64, s: f64| LimitReport {
            oscillators: a,
            trials: 1,
            mean_q: 1.0,
            spread_q: s,
            s_star_error: 0.0,
            s_star_error_naive: 0.0,
            resampled: 0,
        };
        let k = spread_scaling_exponent(&[mk(100, 0.1), mk(10_000, 0.01)]).unwrap();
        assert!((k + 0.5).abs() < 1e-12);
        assert!(spread_scaling_exponent(&[mk(100, 0.1)]).is_err());
    }
}
