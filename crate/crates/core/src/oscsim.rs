//! Time-domain ensembles of a charged oscillator driven by a synthesized
//! random field.
//!
//! Each realization integrates
//!
//! ```text
//! x'' + gamma x' + omega^2 x = (e/m) E_x(t),   gamma = (2/3)(e^2/m) omega^2
//! ```
//!
//! where linear damping stands in for the radiation-reaction force; the two
//! agree to O(tau) near resonance. Only E_x drives the one-dimensional
//! oscillator: the factor 4 pi / 3 of the resonance integral is the
//! one-component share of the isotropic field.
//!
//! The integrator is a Strang splitting: exact damping half-steps wrapped
//! around a velocity-Verlet kick-drift-kick. The drive on the time grid
//! comes from one inverse FFT of the mode table per realization.

use std::io::{self, Write};
use std::sync::Arc;

use rustfft::FftPlanner;

use crate::error::{domain, Error, Result};
use crate::export::fmt_num;
use crate::fieldsynth::{ModeGrid, UniformField};
use crate::parallel::{map_indexed, MeanVar};
use crate::resonance::{narrow_resonance_value, OscillatorParams};
use crate::spectra::SpectralDensity;

/// Upper bound on omega * dt.
pub const MAX_PHASE_STEP: f64 = 0.05;

/// Energy blow-up threshold relative to the expected mean energy.
const BLOWUP_FACTOR: f64 = 1e6;

/// Settings for the driven-oscillator ensembles.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SimConfig {
    pub params: OscillatorParams,
    /// Largest allowed time step. The step actually used is the FFT grid
    /// step, which never exceeds this.
    pub dt: f64,
    pub t_relax: f64,
    pub t_measure: f64,
    pub n_realizations: usize,
    pub seed: u64,
    /// Upper end of the synthesized band (0, band_end].
    pub band_end: f64,
    /// Field modes per damping width gamma.
    pub modes_per_width: f64,
}

impl SimConfig {
    /// omega dt = 0.04, 10/gamma of relaxation, 100/gamma of measurement,
    /// 200 realizations and a field band up to 2 omega resolved with 20
    /// modes per damping width.
    pub fn new(params: OscillatorParams, seed: u64) -> Self {
        let gamma = params.damping_rate();
        Self {
            params,
            dt: 0.04 / params.omega(),
            t_relax: 10.0 / gamma,
            t_measure: 100.0 / gamma,
            n_realizations: 200,
            seed,
            band_end: 2.0 * params.omega(),
            modes_per_width: 20.0,
        }
    }

    pub fn damping_rate(&self) -> f64 {
        self.params.damping_rate()
    }

    pub fn validate(&self) -> Result<()> {
        let omega = self.params.omega();
        let gamma = self.damping_rate();
        if !(self.dt > 0.0) || !(self.dt * omega < MAX_PHASE_STEP) {
            return domain(format!(
                "time step dt = {} violates dt * omega < {MAX_PHASE_STEP}",
                self.dt
            ));
        }
        if !(self.t_relax * gamma >= 5.0) {
            return domain(format!(
                "relaxation time {} is shorter than 5/gamma = {}",
                self.t_relax,
                5.0 / gamma
            ));
        }
        if !(self.t_measure > 0.0) {
            return domain("measurement time must be positive");
        }
        if self.n_realizations == 0 {
            return domain("need at least one realization");
        }
        if !(self.band_end > omega) {
            return domain(format!(
                "field band (0, {}] must extend past omega = {omega}",
                self.band_end
            ));
        }
        if !(self.modes_per_width >= 1.0) {
            return domain("need at least one field mode per damping width");
        }
        Ok(())
    }

    fn mode_grid(&self, density: &SpectralDensity) -> Result<ModeGrid> {
        let spacing = self.damping_rate() / self.modes_per_width;
        let n_modes = (self.band_end / spacing).ceil() as usize;
        ModeGrid::new(density, 0.0, self.band_end, n_modes.max(2))
    }
}

/// Ensemble-and-time statistics of the oscillator energy.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EnergyStats {
    pub mean: f64,
    pub variance: f64,
    pub mean_std_error: f64,
    pub variance_std_error: f64,
    /// Decorrelated samples: realizations times measurement strides of 1/gamma.
    pub n_samples: u64,
    pub kinetic_mean: f64,
    pub potential_mean: f64,
    pub realizations: usize,
    /// Time step actually used.
    pub dt: f64,
}

impl EnergyStats {
    pub fn variance_ratio(&self) -> f64 {
        self.variance / (self.mean * self.mean)
    }
}

/// Normalized histogram of sampled energies.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyHistogram {
    /// Bin edges, `n_bins + 1` of them, from 0 to the largest sample.
    pub edges: Vec<f64>,
    /// Probability density per bin; integrates to 1.
    pub density: Vec<f64>,
    pub counts: Vec<u64>,
    pub sample_mean: f64,
    pub fraction_below_mean: f64,
    /// Decay rate of a weighted least-squares exponential fit to the density.
    pub fitted_rate: f64,
}

/// Sample of one realization's trajectory.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrajectoryPoint {
    pub t: f64,
    pub x: f64,
    pub v: f64,
    pub energy: f64,
}

struct Plan {
    grid: Arc<ModeGrid>,
    fft: Arc<dyn rustfft::Fft<f64>>,
    dt: f64,
    relax_steps: usize,
    measure_steps: usize,
    stride_steps: usize,
    expected: f64,
}

impl Plan {
    fn new(cfg: &SimConfig, density: &SpectralDensity) -> Result<Self> {
        cfg.validate()?;
        let grid = Arc::new(cfg.mode_grid(density)?);
        let n_fft = grid.fft_length(cfg.dt);
        let fft = FftPlanner::new().plan_fft_inverse(n_fft);
        let dt = std::f64::consts::TAU / (grid.spacing() * n_fft as f64);
        let stride = 1.0 / cfg.damping_rate();
        Ok(Self {
            grid,
            fft,
            dt,
            relax_steps: (cfg.t_relax / dt).ceil() as usize,
            measure_steps: (cfg.t_measure / dt).ceil() as usize,
            stride_steps: ((stride / dt).round() as usize).max(1),
            expected: narrow_resonance_value(&cfg.params, density)?,
        })
    }

    fn drive(&self, cfg: &SimConfig, index: usize) -> Result<UniformField> {
        self.grid.realize(cfg.seed, index as u64).sample_uniform_with(0, &self.fft)
    }
}

/// Velocity-Verlet with exact damping half-steps.
struct Stepper {
    omega2: f64,
    half_dt: f64,
    dt: f64,
    damp_half: f64,
    coupling: f64,
}

impl Stepper {
    fn new(params: &OscillatorParams, dt: f64) -> Self {
        Self {
            omega2: params.omega() * params.omega(),
            half_dt: 0.5 * dt,
            dt,
            damp_half: (-0.5 * params.damping_rate() * dt).exp(),
            coupling: params.charge() / params.mass(),
        }
    }

    #[inline]
    fn step(&self, x: &mut f64, v: &mut f64, e_now: f64, e_next: f64) {
        *v *= self.damp_half;
        *v += self.half_dt * (self.coupling * e_now - self.omega2 * *x);
        *x += self.dt * *v;
        *v += self.half_dt * (self.coupling * e_next - self.omega2 * *x);
        *v *= self.damp_half;
    }
}

#[derive(Debug, Clone, Default)]
struct RealizationSummary {
    mean: f64,
    mean_sq: f64,
    kinetic: f64,
    potential: f64,
    // per-stride averages of eps and eps^2
    blocks: Vec<(f64, f64)>,
    samples: Vec<f64>,
}

fn run_realization(
    cfg: &SimConfig,
    plan: &Plan,
    index: usize,
    sample_every: Option<usize>,
) -> Result<RealizationSummary> {
    let field = plan.drive(cfg, index)?;
    let stepper = Stepper::new(&cfg.params, plan.dt);
    let mass = cfg.params.mass();
    let bound = BLOWUP_FACTOR * plan.expected.max(f64::MIN_POSITIVE);
    let (mut x, mut v) = (0.0, 0.0);
    let mut e_now = field.at(0);

    for m in 0..plan.relax_steps {
        let e_next = field.at(m + 1);
        stepper.step(&mut x, &mut v, e_now, e_next);
        e_now = e_next;
    }

    let mut out = RealizationSummary::default();
    let (mut sum, mut sum_sq, mut kin, mut pot) = (0.0, 0.0, 0.0, 0.0);
    let (mut block_sum, mut block_sq, mut block_len) = (0.0, 0.0, 0usize);
    for i in 0..plan.measure_steps {
        let m = plan.relax_steps + i;
        let e_next = field.at(m + 1);
        stepper.step(&mut x, &mut v, e_now, e_next);
        e_now = e_next;

        let k = 0.5 * mass * v * v;
        let p = 0.5 * mass * stepper.omega2 * x * x;
        let eps = k + p;
        if !(eps <= bound) {
            return Err(Error::Unstable {
                dt: plan.dt,
                time: (m + 1) as f64 * plan.dt,
                energy: eps,
            });
        }
        sum += eps;
        sum_sq += eps * eps;
        kin += k;
        pot += p;
        block_sum += eps;
        block_sq += eps * eps;
        block_len += 1;
        if block_len == plan.stride_steps {
            out.blocks.push((block_sum / block_len as f64, block_sq / block_len as f64));
            (block_sum, block_sq, block_len) = (0.0, 0.0, 0);
        }
        if let Some(every) = sample_every {
            if i % every == 0 {
                out.samples.push(eps);
            }
        }
    }
    let n = plan.measure_steps as f64;
    out.mean = sum / n;
    out.mean_sq = sum_sq / n;
    out.kinetic = kin / n;
    out.potential = pot / n;
    Ok(out)
}

fn run(
    cfg: &SimConfig,
    density: &SpectralDensity,
    sample_every_stride_fraction: Option<usize>,
) -> Result<(EnergyStats, Vec<f64>)> {
    let plan = Plan::new(cfg, density)?;
    let sample_every = sample_every_stride_fraction.map(|k| (plan.stride_steps / k).max(1));
    let runs = map_indexed(cfg.n_realizations, |r| run_realization(cfg, &plan, r, sample_every));
    let runs = runs.into_iter().collect::<Result<Vec<_>>>()?;

    let r = runs.len() as f64;
    let mean = runs.iter().map(|s| s.mean).sum::<f64>() / r;
    let second = runs.iter().map(|s| s.mean_sq).sum::<f64>() / r;
    let variance = second - mean * mean;
    let kinetic_mean = runs.iter().map(|s| s.kinetic).sum::<f64>() / r;
    let potential_mean = runs.iter().map(|s| s.potential).sum::<f64>() / r;

    // Independent units for the error bars: whole realizations when there
    // are several, otherwise the stride blocks of the single one.
    let units: Vec<(f64, f64)> = if runs.len() >= 2 {
        runs.iter().map(|s| (s.mean, s.mean_sq)).collect()
    } else {
        runs[0].blocks.clone()
    };
    let mean_err = MeanVar::from_slice(&units.iter().map(|u| u.0).collect::<Vec<_>>()).std_error();
    let var_err = MeanVar::from_slice(&units.iter().map(|u| u.1 - 2.0 * mean * u.0).collect::<Vec<_>>()).std_error();

    let strides = (cfg.t_measure * cfg.damping_rate()).floor().max(1.0) as u64;
    let stats = EnergyStats {
        mean,
        variance,
        mean_std_error: mean_err,
        variance_std_error: var_err,
        n_samples: cfg.n_realizations as u64 * strides,
        kinetic_mean,
        potential_mean,
        realizations: cfg.n_realizations,
        dt: plan.dt,
    };
    let samples = runs.into_iter().flat_map(|s| s.samples).collect();
    Ok((stats, samples))
}

/// Runs the ensemble and returns energy statistics over realizations and
/// the measurement window.
pub fn simulate_ensemble(cfg: &SimConfig, density: &SpectralDensity) -> Result<EnergyStats> {
    Ok(run(cfg, density, None)?.0)
}

/// Energies sampled four times per decorrelation stride across the
/// ensemble, binned on [0, max] into `n_bins` bins.
pub fn energy_histogram(cfg: &SimConfig, density: &SpectralDensity, n_bins: usize) -> Result<(EnergyStats, EnergyHistogram)> {
    if n_bins == 0 {
        return domain("histogram needs at least one bin");
    }
    let (stats, samples) = run(cfg, density, Some(4))?;
    Ok((stats, histogram(&samples, n_bins)?))
}

/// Normalized histogram with an exponential fit.
pub fn histogram(samples: &[f64], n_bins: usize) -> Result<EnergyHistogram> {
    if samples.is_empty() || n_bins == 0 {
        return domain("histogram needs samples and at least one bin");
    }
    let top = samples.iter().copied().fold(0.0, f64::max);
    if !(top > 0.0) {
        return domain("all sampled energies are zero");
    }
    let width = top / n_bins as f64;
    let mut counts = vec![0u64; n_bins];
    for &e in samples {
        let b = ((e / width) as usize).min(n_bins - 1);
        counts[b] += 1;
    }
    let total = samples.len() as f64;
    let density: Vec<f64> = counts.iter().map(|&c| c as f64 / (total * width)).collect();
    let edges: Vec<f64> = (0..=n_bins).map(|i| i as f64 * width).collect();
    let sample_mean = samples.iter().sum::<f64>() / total;
    let fraction_below_mean = samples.iter().filter(|&&e| e < sample_mean).count() as f64 / total;

    // ln(density) = c - rate * centre, weighted by counts
    let (mut sw, mut sx, mut sy, mut sxx, mut sxy) = (0.0, 0.0, 0.0, 0.0, 0.0);
    for (b, (&c, &d)) in counts.iter().zip(&density).enumerate() {
        if c == 0 {
            continue;
        }
        let w = c as f64;
        let xc = (b as f64 + 0.5) * width;
        let y = d.ln();
        sw += w;
        sx += w * xc;
        sy += w * y;
        sxx += w * xc * xc;
        sxy += w * xc * y;
    }
    let denom = sw * sxx - sx * sx;
    let fitted_rate = if denom > 0.0 { -(sw * sxy - sx * sy) / denom } else { f64::NAN };

    Ok(EnergyHistogram {
        edges,
        density,
        counts,
        sample_mean,
        fraction_below_mean,
        fitted_rate,
    })
}

/// Trajectory of one realization over relaxation and measurement,
/// recorded every `stride` steps.
pub fn simulate_trajectory(
    cfg: &SimConfig,
    density: &SpectralDensity,
    realization: usize,
    stride: usize,
) -> Result<Vec<TrajectoryPoint>> {
    if stride == 0 {
        return domain("trajectory stride must be >= 1");
    }
    let plan = Plan::new(cfg, density)?;
    let field = plan.drive(cfg, realization)?;
    let stepper = Stepper::new(&cfg.params, plan.dt);
    let mass = cfg.params.mass();
    let (mut x, mut v) = (0.0, 0.0);
    let total = plan.relax_steps + plan.measure_steps;
    let mut out = Vec::with_capacity(total / stride + 1);
    let mut e_now = field.at(0);
    for m in 0..=total {
        if m % stride == 0 {
            out.push(TrajectoryPoint {
                t: m as f64 * plan.dt,
                x,
                v,
                energy: 0.5 * mass * (v * v + stepper.omega2 * x * x),
            });
        }
        if m < total {
            let e_next = field.at(m + 1);
            stepper.step(&mut x, &mut v, e_now, e_next);
            e_now = e_next;
        }
    }
    Ok(out)
}

/// Writes `(t, x, v, eps)` rows with a header line.
pub fn write_trajectory_csv<W: Write>(points: &[TrajectoryPoint], out: &mut W) -> io::Result<()> {
    writeln!(out, "t,x,v,eps")?;
    for p in points {
        writeln!(out, "{},{},{},{}", fmt_num(p.t), fmt_num(p.x), fmt_num(p.v), fmt_num(p.energy))?;
    }
    Ok(())
}
