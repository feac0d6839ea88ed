use thiserror::Error;

/// Errors raised by the numerical routines of this crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// An argument violated a precondition of the called routine.
    #[error("domain error: {0}")]
    Domain(String),

    /// Adaptive quadrature ran out of function evaluations before reaching
    /// the requested tolerance. The best estimate so far is kept.
    #[error(
        "quadrature budget of {evals} evaluations exhausted: estimate {estimate:e}, \
         achieved error {error:e}, requested {requested:e}"
    )]
    QuadratureBudget {
        estimate: f64,
        error: f64,
        requested: f64,
        evals: usize,
    },

    /// Oscillator energy blew up during time stepping.
    #[error("unstable integration with dt = {dt}: energy {energy:e} at t = {time} exceeds bound")]
    Unstable { dt: f64, time: f64, energy: f64 },

    /// The adaptive ODE step shrank below the representable resolution.
    #[error("ODE step underflow at T = {temperature} (step {step:e})")]
    StepUnderflow { temperature: f64, step: f64 },

    /// The ODE solution left the physical branch <eps> >= omega/2.
    #[error("solution fell below omega/2 at T = {temperature} (energy {energy})")]
    Unphysical { temperature: f64, energy: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn domain<T>(msg: impl Into<String>) -> Result<T> {
    Err(Error::Domain(msg.into()))
}
