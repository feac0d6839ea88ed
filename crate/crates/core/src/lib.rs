//! Classical stochastic electrodynamics of matter oscillators.
//!
//! The crate follows one chain of reasoning numerically, from the
//! zeropoint and thermal radiation spectra through a radiatively damped
//! oscillator to the counting of energy fractions among many oscillators:
//!
//! * [`spectra`]: closed-form spectral densities and mean oscillator energies
//! * [`resonance`]: the resonance integral for the mean energy and its
//!   narrow-resonance limit
//! * [`fieldsynth`]: random-phase synthesis of Gaussian fields and of
//!   per-site probability weights
//! * [`oscsim`]: time-domain ensembles of field-driven oscillators
//! * [`fluctuation`]: the energy-fluctuation ODE and its coth solution
//! * [`counting`]: occupation probabilities for distinguishable fractions
//! * [`thermo`]: entropies, temperature and the thermodynamic limit
//!
//! Natural units are used everywhere: hbar = c = k_B = 1.

// NaN must fail the validity checks, hence `!(x > 0.0)` style guards.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod counting;
pub mod error;
pub mod export;
pub mod fieldsynth;
pub mod fluctuation;
pub mod oscsim;
pub mod parallel;
pub mod quadrature;
pub mod resonance;
pub mod special;
pub mod spectra;
pub mod thermo;

pub use error::{Error, Result};
pub use resonance::{OscillatorParams, QuadratureConfig};
pub use spectra::{SpectralDensity, TabulatedDensity, ThermoState};
