use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

/// Stochastic-electrodynamics route to the Planck spectrum: closed forms,
/// resonance quadrature, field and oscillator ensembles, and the
/// fraction-counting statistics. All quantities are in natural units with
/// the oscillator frequency set to 1.
#[derive(Debug, Parser)]
#[command(name = "sedplanck", version, args_override_self = true)]
pub struct Cli {
    #[command(flatten)]
    pub common: Common,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Clone, Args, Serialize)]
pub struct Common {
    /// Master seed for every random stream.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, global = true, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
    /// Write the table here instead of stdout.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// Worker threads: a count or "auto". Results do not depend on it.
    #[arg(long, global = true, default_value = "auto")]
    pub threads: String,
    /// key=value file with defaults for any flag of the subcommand.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Write the run manifest here instead of stderr.
    #[arg(long, global = true)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum DensityKind {
    Zeropoint,
    Thermal,
    Total,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Weights {
    /// Uniform on the simplex.
    Flat,
    /// Proportional to random Gaussian field energies.
    Field,
}

pub const SUBCOMMANDS: [&str; 8] = [
    "spectrum",
    "resonance",
    "field-sim",
    "osc-sim",
    "fluctuation",
    "counting",
    "entropy",
    "limit",
];

#[derive(Debug, Subcommand, Serialize)]
#[serde(untagged)]
pub enum Command {
    /// Closed-form mean energy and spectral density against x = omega/T.
    Spectrum(SpectrumArgs),
    /// Resonance integral for the mean energy against the narrow-line value.
    Resonance(ResonanceArgs),
    /// Ensemble field correlation against its cosine-transform model.
    #[command(name = "field-sim")]
    FieldSim(FieldSimArgs),
    /// Driven damped oscillator ensemble statistics.
    #[command(name = "osc-sim")]
    OscSim(OscSimArgs),
    /// Numerical solution of the energy-fluctuation ODE in T.
    Fluctuation(FluctuationArgs),
    /// Occupation probability of energy fractions, exact and Monte Carlo.
    Counting(CountingArgs),
    /// Entropy per oscillator and temperature against r = u/omega.
    Entropy(EntropyArgs),
    /// Fraction-size statistics approaching the thermodynamic limit.
    Limit(LimitArgs),
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Spectrum(_) => "spectrum",
            Self::Resonance(_) => "resonance",
            Self::FieldSim(_) => "field-sim",
            Self::OscSim(_) => "osc-sim",
            Self::Fluctuation(_) => "fluctuation",
            Self::Counting(_) => "counting",
            Self::Entropy(_) => "entropy",
            Self::Limit(_) => "limit",
        }
    }
}

#[derive(Debug, Args, Serialize)]
pub struct SpectrumArgs {
    #[arg(long = "x-min", default_value_t = 0.1)]
    pub x_min: f64,
    #[arg(long = "x-max", default_value_t = 10.0)]
    pub x_max: f64,
    #[arg(long, default_value_t = 50)]
    pub points: usize,
    /// Space the x grid geometrically.
    #[arg(long)]
    pub log: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ResonanceArgs {
    /// Damping parameters tau, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "1e-6")]
    pub tau: Vec<f64>,
    #[arg(long, value_enum, default_value_t = DensityKind::Total)]
    pub density: DensityKind,
    /// T / omega.
    #[arg(long = "temp-ratio", default_value_t = 0.0)]
    pub temp_ratio: f64,
    /// Half-width of the resolved window in damping widths.
    #[arg(long = "wing-halfwidths", default_value_t = 50.0)]
    pub wing_halfwidths: f64,
    /// Upper integration limit in units of omega.
    #[arg(long = "cutoff-ratio", default_value_t = 100.0)]
    pub cutoff_ratio: f64,
    #[arg(long = "rel-tol", default_value_t = 1e-10)]
    pub rel_tol: f64,
    #[arg(long = "max-evals", default_value_t = 2_000_000)]
    pub max_evals: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct FieldSimArgs {
    #[arg(long, value_enum, default_value_t = DensityKind::Zeropoint)]
    pub density: DensityKind,
    #[arg(long = "temp-ratio", default_value_t = 0.0)]
    pub temp_ratio: f64,
    #[arg(long = "omega-max", default_value_t = 5.0)]
    pub omega_max: f64,
    #[arg(long, default_value_t = 2000)]
    pub modes: usize,
    #[arg(long, default_value_t = 1000)]
    pub realizations: usize,
    #[arg(long = "t-max", default_value_t = 10.0)]
    pub t_max: f64,
    #[arg(long = "t-points", default_value_t = 41)]
    pub t_points: usize,
    /// Emit (t, Ex, Ey, Ez) of realization 0 instead of the correlation.
    #[arg(long)]
    pub trajectory: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct OscSimArgs {
    #[arg(long, default_value_t = 1e-3)]
    pub tau: f64,
    #[arg(long, value_enum, default_value_t = DensityKind::Total)]
    pub density: DensityKind,
    #[arg(long = "temp-ratio", default_value_t = 0.0)]
    pub temp_ratio: f64,
    #[arg(long, default_value_t = 200)]
    pub realizations: usize,
    /// Relaxation time in units of 1/gamma.
    #[arg(long, default_value_t = 10.0)]
    pub relax: f64,
    /// Measurement time in units of 1/gamma.
    #[arg(long, default_value_t = 100.0)]
    pub measure: f64,
    /// Largest omega * dt.
    #[arg(long, default_value_t = 0.04)]
    pub dt: f64,
    /// Upper end of the field band in units of omega.
    #[arg(long, default_value_t = 2.0)]
    pub band: f64,
    #[arg(long = "modes-per-width", default_value_t = 20.0)]
    pub modes_per_width: f64,
    /// Also write an energy histogram (lo, hi, count, density) here.
    #[arg(long)]
    pub histogram: Option<std::path::PathBuf>,
    #[arg(long, default_value_t = 50)]
    pub bins: usize,
    /// Also write the (t, x, v, eps) trajectory of realization 0 here.
    #[arg(long = "trajectory-out")]
    pub trajectory_out: Option<std::path::PathBuf>,
    #[arg(long = "trajectory-stride", default_value_t = 25)]
    pub trajectory_stride: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct FluctuationArgs {
    /// Starting T / omega.
    #[arg(long = "t-start", default_value_t = 0.05)]
    pub t_start: f64,
    /// Final T / omega.
    #[arg(long = "t-end", default_value_t = 1.0)]
    pub t_end: f64,
    /// Starting <eps> / omega; defaults to the low-temperature asymptote.
    #[arg(long)]
    pub initial: Option<f64>,
    #[arg(long = "rel-tol", default_value_t = 1e-10)]
    pub rel_tol: f64,
}

#[derive(Debug, Args, Serialize)]
pub struct CountingArgs {
    /// Oscillator count A.
    #[arg(long = "A")]
    pub oscillators: u64,
    /// Fraction count N.
    #[arg(long = "N")]
    pub fractions: u64,
    /// Occupation numbers, comma separated; defaults to N/A each.
    #[arg(long, value_delimiter = ',')]
    pub occ: Option<Vec<f64>>,
    #[arg(long, default_value_t = 1_000_000)]
    pub samples: u64,
    #[arg(long, value_enum, default_value_t = Weights::Flat)]
    pub weights: Weights,
}

#[derive(Debug, Args, Serialize)]
pub struct EntropyArgs {
    #[arg(long = "r-min", default_value_t = 0.0)]
    pub r_min: f64,
    #[arg(long = "r-max", default_value_t = 10.0)]
    pub r_max: f64,
    #[arg(long, default_value_t = 101)]
    pub points: usize,
}

#[derive(Debug, Args, Serialize)]
pub struct LimitArgs {
    /// Oscillator counts, comma separated.
    #[arg(long = "A", value_delimiter = ',', default_value = "10000")]
    pub oscillators: Vec<u64>,
    #[arg(long = "temp-ratio", default_value_t = 1.0)]
    pub temp_ratio: f64,
    #[arg(long, default_value_t = 1000)]
    pub trials: u64,
    /// N / A for the naive fraction size.
    #[arg(long = "fraction-ratio", default_value_t = 1.0)]
    pub fraction_ratio: f64,
    /// Scale of the energy fluctuation width; 0 pins U to its mean.
    #[arg(long = "fluct-scale", default_value_t = 1.0)]
    pub fluct_scale: f64,
}
