//! Random-phase synthesis of classical Gaussian electric fields with a
//! prescribed spectral density, plus the per-site probability weights
//! used by the counting estimators.
//!
//! A realization is
//!
//! ```text
//! E_j(t) = sum_k A_k cos(w_k t + phi_kj),   j = x, y, z
//! A_k    = sqrt(8 pi rho(w_k) dw / 3)
//! ```
//!
//! on an equally spaced midpoint grid. Averaging over the i.i.d. uniform
//! phases gives `<E(t).E(0)> / 4 pi = sum_k rho(w_k) cos(w_k t) dw`, the
//! midpoint rule for the cosine transform of rho. Amplitudes are fixed, so
//! the field is Gaussian only in the many-mode limit.

use std::f64::consts::{PI, TAU};
use std::io::{self, Write};
use std::sync::Arc;

use rand::Rng;
use rand_distr::{Distribution, Exp1, StandardNormal};
use rustfft::num_complex::Complex64;
use rustfft::{Fft, FftPlanner};

use crate::error::{domain, Result};
use crate::export::fmt_num;
use crate::parallel::{map_indexed, stream_rng, MeanVar};
use crate::quadrature::{self, Tolerance};
use crate::spectra::SpectralDensity;

/// Frequencies and amplitudes shared by every realization of a field.
#[derive(Debug, Clone, PartialEq)]
pub struct ModeGrid {
    band_start: f64,
    spacing: f64,
    frequencies: Vec<f64>,
    amplitudes: Vec<f64>,
}

impl ModeGrid {
    /// `n_modes` equal cells over `(band_start, band_end]`, one mode at the
    /// midpoint of each.
    pub fn new(density: &SpectralDensity, band_start: f64, band_end: f64, n_modes: usize) -> Result<Self> {
        if n_modes < 2 {
            return domain(format!("field synthesis needs at least 2 modes, got {n_modes}"));
        }
        if !(band_start >= 0.0) || !(band_end > band_start) || !band_end.is_finite() {
            return domain(format!("invalid synthesis band ({band_start}, {band_end}]"));
        }
        density.check_support(band_start, band_end)?;
        let spacing = (band_end - band_start) / n_modes as f64;
        let frequencies: Vec<f64> = (0..n_modes)
            .map(|k| band_start + (k as f64 + 0.5) * spacing)
            .collect();
        let amplitudes = frequencies
            .iter()
            .map(|&w| Ok((8.0 * PI * density.eval(w)? * spacing / 3.0).sqrt()))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            band_start,
            spacing,
            frequencies,
            amplitudes,
        })
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.frequencies
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.amplitudes
    }

    pub fn spacing(&self) -> f64 {
        self.spacing
    }

    pub fn band_start(&self) -> f64 {
        self.band_start
    }

    pub fn len(&self) -> usize {
        self.frequencies.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frequencies.is_empty()
    }

    /// Smallest 2^a 3^b 5^c FFT length that covers every mode and gives a
    /// sampling step no larger than `dt_max`.
    pub fn fft_length(&self, dt_max: f64) -> usize {
        let needed = (TAU / (self.spacing * dt_max)).ceil().max(self.len() as f64) as usize;
        smooth_length(needed)
    }

    /// Midpoint-rule value of `<E(t).E(0)> / 4 pi` on this grid.
    pub fn correlation(&self, t: f64) -> f64 {
        let factor = 3.0 / (8.0 * PI);
        self.frequencies
            .iter()
            .zip(&self.amplitudes)
            .map(|(&w, &a)| factor * a * a * (w * t).cos())
            .sum()
    }

    /// Draws the phases of realization `index` under `seed`.
    pub fn realize(self: &Arc<Self>, seed: u64, index: u64) -> FieldModeTable {
        let mut rng = stream_rng(seed, index);
        let phases = (0..self.len())
            .map(|_| {
                [
                    rng.random::<f64>() * TAU,
                    rng.random::<f64>() * TAU,
                    rng.random::<f64>() * TAU,
                ]
            })
            .collect();
        FieldModeTable {
            grid: Arc::clone(self),
            phases,
            seed,
            index,
        }
    }
}

fn smooth_length(min: usize) -> usize {
    let mut n = min.max(1);
    loop {
        let mut m = n;
        for p in [2, 3, 5] {
            while m.is_multiple_of(p) {
                m /= p;
            }
        }
        if m == 1 {
            return n;
        }
        n += 1;
    }
}

/// One sampled field: the shared mode grid plus its random phases.
#[derive(Debug, Clone, PartialEq)]
pub struct FieldModeTable {
    grid: Arc<ModeGrid>,
    phases: Vec<[f64; 3]>,
    seed: u64,
    index: u64,
}

/// Field over `(0, omega_max]` with `n_modes` modes; realization 0 of `seed`.
pub fn synthesize(density: &SpectralDensity, omega_max: f64, n_modes: usize, seed: u64) -> Result<FieldModeTable> {
    let grid = Arc::new(ModeGrid::new(density, 0.0, omega_max, n_modes)?);
    Ok(grid.realize(seed, 0))
}

impl FieldModeTable {
    pub fn grid(&self) -> &ModeGrid {
        &self.grid
    }

    pub fn frequencies(&self) -> &[f64] {
        &self.grid.frequencies
    }

    pub fn amplitudes(&self) -> &[f64] {
        &self.grid.amplitudes
    }

    pub fn phases(&self) -> &[[f64; 3]] {
        &self.phases
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn index(&self) -> u64 {
        self.index
    }

    /// E(t), summed mode by mode.
    pub fn field(&self, t: f64) -> [f64; 3] {
        let mut e = [0.0; 3];
        for ((&w, &a), ph) in self.frequencies().iter().zip(self.amplitudes()).zip(&self.phases) {
            for j in 0..3 {
                e[j] += a * (w * t + ph[j]).cos();
            }
        }
        e
    }

    /// Samples one component on the uniform grid `t_m = m dt` using an
    /// inverse FFT of length `n_fft`, with `dt = 2 pi / (dw n_fft)`.
    pub fn sample_uniform(&self, component: usize, n_fft: usize) -> Result<UniformField> {
        let plan = FftPlanner::new().plan_fft_inverse(n_fft);
        self.sample_uniform_with(component, &plan)
    }

    /// [`Self::sample_uniform`] with a caller-held inverse FFT plan, whose
    /// length sets `n_fft`.
    pub fn sample_uniform_with(&self, component: usize, plan: &Arc<dyn Fft<f64>>) -> Result<UniformField> {
        let n = self.grid.len();
        let n_fft = plan.len();
        if component > 2 {
            return domain(format!("field component must be 0, 1 or 2, got {component}"));
        }
        if n_fft < n {
            return domain(format!("FFT length {n_fft} is shorter than the {n} modes"));
        }
        let mut buf = vec![Complex64::new(0.0, 0.0); n_fft];
        for (k, slot) in buf.iter_mut().take(n).enumerate() {
            *slot = Complex64::from_polar(self.grid.amplitudes[k], self.phases[k][component]);
        }
        plan.process(&mut buf);
        let dt = TAU / (self.grid.spacing * n_fft as f64);
        Ok(UniformField {
            dt,
            carrier: self.grid.band_start + 0.5 * self.grid.spacing,
            envelope: buf,
        })
    }

    /// Writes `(t, Ex, Ey, Ez)` rows with a header line.
    pub fn write_trajectory_csv<W: Write>(&self, times: &[f64], out: &mut W) -> io::Result<()> {
        writeln!(out, "t,Ex,Ey,Ez")?;
        for &t in times {
            let e = self.field(t);
            writeln!(out, "{},{},{},{}", fmt_num(t), fmt_num(e[0]), fmt_num(e[1]), fmt_num(e[2]))?;
        }
        Ok(())
    }

    /// Per-mode spectral density recovered by projecting `n_samples`
    /// uniform samples over `[0, 4 pi / dw)` onto each mode frequency.
    /// On that window the grid frequencies are orthogonal whenever
    /// `2 band_start / dw` is an integer.
    pub fn periodogram(&self, n_samples: usize) -> Vec<f64> {
        let dw = self.grid.spacing;
        let window = 2.0 * TAU / dw;
        let dt = window / n_samples as f64;
        let samples: Vec<[f64; 3]> = (0..n_samples).map(|m| self.field(m as f64 * dt)).collect();
        self.frequencies()
            .iter()
            .map(|&w| {
                let mut power = 0.0;
                for j in 0..3 {
                    let (mut re, mut im) = (0.0, 0.0);
                    for (m, e) in samples.iter().enumerate() {
                        let (s, c) = (w * m as f64 * dt).sin_cos();
                        re += e[j] * c;
                        im -= e[j] * s;
                    }
                    re /= n_samples as f64;
                    im /= n_samples as f64;
                    power += re * re + im * im;
                }
                // |X|^2 = A^2 / 4 per component and rho = 3 A^2 / (8 pi dw)
                power / (2.0 * PI * dw)
            })
            .collect()
    }
}

/// A field component sampled on `t_m = m dt`, stored as the FFT envelope
/// of one period `2 pi / dw`.
#[derive(Debug, Clone)]
pub struct UniformField {
    dt: f64,
    carrier: f64,
    envelope: Vec<Complex64>,
}

impl UniformField {
    pub fn dt(&self) -> f64 {
        self.dt
    }

    /// E(m dt); the envelope repeats with period `n_fft`.
    pub fn at(&self, m: usize) -> f64 {
        let env = self.envelope[m % self.envelope.len()];
        let angle = (self.carrier * self.dt * m as f64).rem_euclid(TAU);
        let (s, c) = angle.sin_cos();
        env.re * c - env.im * s
    }
}

/// Ensemble estimate of the field correlation function.
#[derive(Debug, Clone, PartialEq)]
pub struct Correlation {
    pub times: Vec<f64>,
    /// `<E(t).E(0)> / 4 pi`
    pub values: Vec<f64>,
    pub std_errors: Vec<f64>,
    /// Ensemble mean of each component of E(t), with standard errors.
    pub mean_field: Vec<[f64; 3]>,
    pub mean_field_errors: Vec<[f64; 3]>,
    pub realizations: usize,
}

struct CorrelationKernel {
    times: Vec<f64>,
    // cos and sin of w_k t, row per time
    cos: Vec<Vec<f64>>,
    sin: Vec<Vec<f64>>,
}

impl CorrelationKernel {
    fn new(grid: &ModeGrid, times: &[f64]) -> Self {
        let (cos, sin) = times
            .iter()
            .map(|&t| grid.frequencies.iter().map(|&w| (w * t).cos()).zip(grid.frequencies.iter().map(|&w| (w * t).sin())).unzip())
            .unzip();
        Self {
            times: times.to_vec(),
            cos,
            sin,
        }
    }

    /// Row per time: [E(t).E(0)/4pi, Ex(t), Ey(t), Ez(t)].
    fn evaluate(&self, table: &FieldModeTable) -> Vec<[f64; 4]> {
        let n = table.grid.len();
        let mut c = vec![[0.0; 3]; n];
        let mut s = vec![[0.0; 3]; n];
        let mut e0 = [0.0; 3];
        for k in 0..n {
            let a = table.grid.amplitudes[k];
            for j in 0..3 {
                let (sn, cs) = table.phases[k][j].sin_cos();
                c[k][j] = a * cs;
                s[k][j] = a * sn;
                e0[j] += c[k][j];
            }
        }
        (0..self.times.len())
            .map(|i| {
                let (cr, sr) = (&self.cos[i], &self.sin[i]);
                let mut et = [0.0; 3];
                for k in 0..n {
                    for j in 0..3 {
                        et[j] += c[k][j] * cr[k] - s[k][j] * sr[k];
                    }
                }
                let dot = et[0] * e0[0] + et[1] * e0[1] + et[2] * e0[2];
                [dot / (4.0 * PI), et[0], et[1], et[2]]
            })
            .collect()
    }
}

fn reduce_correlation(times: &[f64], rows: Vec<Vec<[f64; 4]>>) -> Correlation {
    let realizations = rows.len();
    let mut acc = vec![[MeanVar::default(); 4]; times.len()];
    for row in &rows {
        for (slot, vals) in acc.iter_mut().zip(row) {
            for q in 0..4 {
                slot[q].push(vals[q]);
            }
        }
    }
    Correlation {
        times: times.to_vec(),
        values: acc.iter().map(|a| a[0].mean).collect(),
        std_errors: acc.iter().map(|a| a[0].std_error()).collect(),
        mean_field: acc.iter().map(|a| [a[1].mean, a[2].mean, a[3].mean]).collect(),
        mean_field_errors: acc
            .iter()
            .map(|a| [a[1].std_error(), a[2].std_error(), a[3].std_error()])
            .collect(),
        realizations,
    }
}

/// Ensemble average of `E(t).E(0) / 4 pi` over the given realizations,
/// which must share one mode grid.
pub fn correlation_empirical(ensemble: &[FieldModeTable], times: &[f64]) -> Result<Correlation> {
    let Some(first) = ensemble.first() else {
        return domain("correlation needs a non-empty ensemble");
    };
    if ensemble.iter().any(|t| t.grid != first.grid) {
        return domain("ensemble members must share one mode grid");
    }
    if ensemble.len() < 100 {
        log::warn!("correlation over only {} realizations", ensemble.len());
    }
    let kernel = CorrelationKernel::new(&first.grid, times);
    let rows = map_indexed(ensemble.len(), |i| kernel.evaluate(&ensemble[i]));
    Ok(reduce_correlation(times, rows))
}

/// Same as [`correlation_empirical`] for realizations `0..n` of `seed`,
/// generated on the fly.
pub fn correlation_ensemble(grid: &Arc<ModeGrid>, seed: u64, n_realizations: usize, times: &[f64]) -> Result<Correlation> {
    if n_realizations == 0 {
        return domain("correlation needs a non-empty ensemble");
    }
    let kernel = CorrelationKernel::new(grid, times);
    let rows = map_indexed(n_realizations, |i| kernel.evaluate(&grid.realize(seed, i as u64)));
    Ok(reduce_correlation(times, rows))
}

/// `int_0^omega_max rho(w) cos(w t) dw` by adaptive quadrature.
pub fn correlation_model(density: &SpectralDensity, omega_max: f64, t: f64) -> Result<f64> {
    density.check_support(0.0, omega_max)?;
    // one panel per half-period keeps the oscillation resolved
    let panels = ((omega_max * t.abs() / PI).ceil() as usize).clamp(1, 100_000);
    let breaks: Vec<f64> = (0..=panels).map(|i| omega_max * i as f64 / panels as f64).collect();
    let est = quadrature::integrate(
        |w| density.eval(w).unwrap_or(0.0) * (w * t).cos(),
        &breaks,
        Tolerance {
            rel: 1e-12,
            abs: 1e-14,
            max_evals: 10_000_000,
        },
    )?;
    Ok(est.value)
}

/// How per-site weights are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum WeightMode {
    /// Uniform on the simplex (Dirichlet(1, ..., 1)).
    FlatSimplex,
    /// Proportional to the local field energy |E_i|^2 of independent
    /// unit-variance three-component Gaussian fields (Dirichlet(3/2, ...)).
    FieldEnergy,
}

impl WeightMode {
    /// Fills `out` with one weight vector.
    pub fn sample_into<R: Rng + ?Sized>(&self, rng: &mut R, out: &mut [f64]) {
        match self {
            Self::FlatSimplex => {
                for a in out.iter_mut() {
                    *a = Exp1.sample(rng);
                }
            }
            Self::FieldEnergy => {
                for a in out.iter_mut() {
                    let (x, y, z): (f64, f64, f64) = (
                        StandardNormal.sample(rng),
                        StandardNormal.sample(rng),
                        StandardNormal.sample(rng),
                    );
                    *a = x * x + y * y + z * z;
                }
            }
        }
        let total: f64 = out.iter().sum();
        for a in out.iter_mut() {
            *a /= total;
        }
    }
}

/// Probability weights alpha_i with 0 <= alpha_i <= 1 and sum 1.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    alphas: Vec<f64>,
    mode: WeightMode,
}

impl WeightVector {
    pub fn new(alphas: Vec<f64>, mode: WeightMode) -> Result<Self> {
        if alphas.is_empty() {
            return domain("weight vector must be non-empty");
        }
        if alphas.iter().any(|a| !(0.0..=1.0).contains(a)) {
            return domain("weights must lie in [0, 1]");
        }
        let total: f64 = alphas.iter().sum();
        if (total - 1.0).abs() > 1e-12 {
            return domain(format!("weights must sum to 1, got {total}"));
        }
        Ok(Self { alphas, mode })
    }

    pub fn alphas(&self) -> &[f64] {
        &self.alphas
    }

    pub fn mode(&self) -> WeightMode {
        self.mode
    }
}

/// One weight vector over `count` sites.
pub fn sample_weights(count: usize, mode: WeightMode, seed: u64) -> Result<WeightVector> {
    if count == 0 {
        return domain("weight vector needs at least one site");
    }
    let mut rng = stream_rng(seed, 0);
    let mut alphas = vec![0.0; count];
    mode.sample_into(&mut rng, &mut alphas);
    WeightVector::new(alphas, mode)
}
