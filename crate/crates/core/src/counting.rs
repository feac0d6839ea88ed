//! Counting distinguishable energy fractions among distinguishable
//! oscillators.
//!
//! The thermal energy U of A oscillators is cut into N fractions of size
//! q = U / N, and oscillator i holds n_i = u_i / q of them (not necessarily
//! an integer). With random absorption weights alpha uniform on the simplex
//! the occupation probability
//!
//! ```text
//! P{n_i} = N! < prod_i alpha_i^{n_i} / Gamma(n_i + 1) >
//! ```
//!
//! equals N! (A-1)! / (N+A-1)! for every occupation vector.

use num_rational::Ratio;

use crate::error::{domain, Result};
use crate::fieldsynth::WeightMode;
use crate::parallel::{map_indexed, stream_rng};
use crate::special::ln_factorial;

/// Relative tolerance for the sum rules of a partition.
const SUM_TOL: f64 = 1e-12;

/// Samples drawn from one random stream in [`probability_mc`].
pub const MC_BATCH: u64 = 1 << 14;

/// Split of a total thermal energy into `fractions` pieces of size
/// `fraction_size` held by the oscillators.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyPartition {
    total_energy: f64,
    fraction_size: f64,
    fractions: u64,
    occupations: Vec<f64>,
}

impl EnergyPartition {
    /// Builds a partition from occupation numbers, whose sum must be a
    /// positive integer N (to 1e-12 relative), and the fraction size q.
    pub fn from_occupations(occupations: Vec<f64>, fraction_size: f64) -> Result<Self> {
        if occupations.is_empty() {
            return domain("partition needs at least one oscillator");
        }
        if occupations.iter().any(|n| !(*n >= 0.0) || !n.is_finite()) {
            return domain("occupation numbers must be finite and >= 0");
        }
        if !(fraction_size > 0.0) || !fraction_size.is_finite() {
            return domain(format!("fraction size must be positive, got {fraction_size}"));
        }
        let sum: f64 = occupations.iter().sum();
        let fractions = sum.round();
        if fractions < 1.0 || (sum - fractions).abs() > SUM_TOL * fractions {
            return domain(format!(
                "occupation numbers must sum to a positive integer, got {sum}"
            ));
        }
        Ok(Self {
            total_energy: fractions * fraction_size,
            fraction_size,
            fractions: fractions as u64,
            occupations,
        })
    }

    /// U
    pub fn total_energy(&self) -> f64 {
        self.total_energy
    }

    /// q = U / N
    pub fn fraction_size(&self) -> f64 {
        self.fraction_size
    }

    /// N
    pub fn fractions(&self) -> u64 {
        self.fractions
    }

    /// A
    pub fn oscillators(&self) -> usize {
        self.occupations.len()
    }

    pub fn occupations(&self) -> &[f64] {
        &self.occupations
    }

    /// u_i = n_i q
    pub fn site_energies(&self) -> Vec<f64> {
        self.occupations.iter().map(|n| n * self.fraction_size).collect()
    }
}

/// Divides the total of the site energies `u` into `n` fractions.
pub fn partition_from_energies(u: &[f64], n: u64) -> Result<EnergyPartition> {
    if u.is_empty() {
        return domain("partition needs at least one site energy");
    }
    if n == 0 {
        return domain("fraction count N must be >= 1");
    }
    if u.iter().any(|x| !(*x >= 0.0) || !x.is_finite()) {
        return domain("site energies must be finite and >= 0");
    }
    let total: f64 = u.iter().sum();
    if total <= 0.0 {
        return domain("site energies are all zero; the fraction size is undefined");
    }
    let q = total / n as f64;
    let mut occupations: Vec<f64> = u.iter().map(|x| x / q).collect();
    // Fold the rounding residue into the largest entry so sum n_i = N.
    let residue = n as f64 - occupations.iter().sum::<f64>();
    let largest = (0..occupations.len())
        .max_by(|&i, &j| occupations[i].total_cmp(&occupations[j]))
        .unwrap();
    occupations[largest] += residue;
    Ok(EnergyPartition {
        total_energy: total,
        fraction_size: q,
        fractions: n,
        occupations,
    })
}

/// An occupation probability, exact or estimated.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProbabilityResult {
    pub log_probability: f64,
    /// `exp(log_probability)`; zero when that underflows.
    pub probability: f64,
    /// Monte Carlo standard error of `probability`.
    pub std_error: Option<f64>,
    pub samples: Option<u64>,
}

impl ProbabilityResult {
    fn exact(log_probability: f64) -> Self {
        Self {
            log_probability,
            probability: log_probability.exp(),
            std_error: None,
            samples: None,
        }
    }
}

/// N! (A-1)! / (N+A-1)!, evaluated in log-gamma space.
pub fn probability_exact(oscillators: u64, fractions: u64) -> Result<ProbabilityResult> {
    if oscillators == 0 {
        return domain("oscillator count A must be >= 1");
    }
    let (a, n) = (oscillators as f64, fractions as f64);
    if n + a - 1.0 <= 22.0 {
        // all three factorials are exact doubles; one rounding in the ratio
        let p = crate::special::factorial(n) * crate::special::factorial(a - 1.0)
            / crate::special::factorial(n + a - 1.0);
        return Ok(ProbabilityResult {
            log_probability: p.ln(),
            probability: p,
            std_error: None,
            samples: None,
        });
    }
    let log_p = ln_factorial(n) + ln_factorial(a - 1.0) - ln_factorial(n + a - 1.0);
    Ok(ProbabilityResult::exact(log_p))
}

/// The same probability as an exact fraction. Fails once (N+A-1)! no
/// longer fits in 128 bits.
pub fn probability_exact_ratio(oscillators: u64, fractions: u64) -> Result<Ratio<u128>> {
    if oscillators == 0 {
        return domain("oscillator count A must be >= 1");
    }
    let top = fractions + oscillators - 1;
    let factorial = |k: u64| -> Option<u128> { (1..=k as u128).try_fold(1u128, |acc, i| acc.checked_mul(i)) };
    match (factorial(fractions), factorial(oscillators - 1), factorial(top)) {
        (Some(nf), Some(af), Some(tf)) => match nf.checked_mul(af) {
            Some(num) => Ok(Ratio::new(num, tf)),
            None => domain(format!("N!(A-1)! overflows u128 for A = {oscillators}, N = {fractions}")),
        },
        _ => domain(format!("(N+A-1)! overflows u128 for A = {oscillators}, N = {fractions}")),
    }
}

/// All weak compositions of `n` into `parts` non-negative integer parts,
/// in lexicographic order.
pub fn weak_compositions(parts: usize, n: u64) -> Vec<Vec<u64>> {
    fn fill(prefix: &mut Vec<u64>, parts: usize, left: u64, out: &mut Vec<Vec<u64>>) {
        if prefix.len() + 1 == parts {
            prefix.push(left);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k);
            fill(prefix, parts, left - k, out);
            prefix.pop();
        }
    }
    let mut out = Vec::new();
    if parts > 0 {
        fill(&mut Vec::with_capacity(parts), parts, n, &mut out);
    }
    out
}

/// Batch summary of `exp(l)` values kept relative to a shift.
#[derive(Debug, Clone, Copy)]
struct ShiftedSums {
    shift: f64,
    sum: f64,
    sum_sq: f64,
    count: u64,
}

impl ShiftedSums {
    fn from_logs(logs: &[f64]) -> Self {
        let shift = logs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let (mut sum, mut sum_sq) = (0.0, 0.0);
        if shift > f64::NEG_INFINITY {
            for &l in logs {
                let v = (l - shift).exp();
                sum += v;
                sum_sq += v * v;
            }
        }
        Self {
            shift,
            sum,
            sum_sq,
            count: logs.len() as u64,
        }
    }

    fn rescale(&self, shift: f64) -> (f64, f64) {
        if self.shift == f64::NEG_INFINITY {
            return (0.0, 0.0);
        }
        let f = (self.shift - shift).exp();
        (self.sum * f, self.sum_sq * f * f)
    }

    fn merge_all(parts: &[Self]) -> Self {
        let shift = parts.iter().map(|p| p.shift).fold(f64::NEG_INFINITY, f64::max);
        let mut sum = 0.0;
        let mut sum_sq = 0.0;
        let mut count = 0;
        for p in parts {
            let (s, s2) = p.rescale(shift);
            sum += s;
            sum_sq += s2;
            count += p.count;
        }
        Self { shift, sum, sum_sq, count }
    }
}

/// Monte Carlo estimate of P{n_i} for the occupation vector of `partition`.
///
/// Weight vectors come from `mode`. With [`WeightMode::FlatSimplex`] the
/// estimate is unbiased for N!(A-1)!/(N+A-1)!. [`WeightMode::FieldEnergy`]
/// draws the field-energy weights without any importance correction, so
/// its deviation from that value is the quantity of interest.
pub fn probability_mc(
    partition: &EnergyPartition,
    samples: u64,
    seed: u64,
    mode: WeightMode,
) -> Result<ProbabilityResult> {
    if samples < 1000 {
        return domain(format!("Monte Carlo needs at least 1000 samples, got {samples}"));
    }
    let occ = partition.occupations();
    if occ.iter().any(|n| *n < 0.0) {
        return domain("occupation numbers must be >= 0");
    }
    let sites = occ.len();
    let batches = samples.div_ceil(MC_BATCH);

    let parts = map_indexed(batches as usize, |b| {
        let b = b as u64;
        let len = MC_BATCH.min(samples - b * MC_BATCH) as usize;
        let mut rng = stream_rng(seed, b);
        let mut alpha = vec![0.0; sites];
        let mut logs = Vec::with_capacity(len);
        for _ in 0..len {
            mode.sample_into(&mut rng, &mut alpha);
            let mut l = 0.0;
            for (&n, &a) in occ.iter().zip(&alpha) {
                // n = 0 contributes a factor 1 even when alpha = 0
                if n > 0.0 {
                    l += n * a.ln();
                }
            }
            logs.push(l);
        }
        ShiftedSums::from_logs(&logs)
    });
    let total = ShiftedSums::merge_all(&parts);

    let count = total.count as f64;
    let prefactor_log =
        ln_factorial(partition.fractions() as f64) - occ.iter().map(|&n| ln_factorial(n)).sum::<f64>();
    if total.sum == 0.0 {
        return Ok(ProbabilityResult {
            log_probability: f64::NEG_INFINITY,
            probability: 0.0,
            std_error: Some(0.0),
            samples: Some(samples),
        });
    }
    let mean = total.sum / count;
    let var = ((total.sum_sq / count - mean * mean) * count / (count - 1.0)).max(0.0);
    let log_p = prefactor_log + total.shift + mean.ln();
    let log_se = prefactor_log + total.shift + 0.5 * (var / count).ln();
    Ok(ProbabilityResult {
        log_probability: log_p,
        probability: log_p.exp(),
        std_error: Some(log_se.exp()),
        samples: Some(samples),
    })
}
