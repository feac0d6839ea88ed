//! Gamma-function helpers for occupation-number combinatorics.
//!
//! Integer arguments up to 22! take an exact table path (every factorial
//! up to 22! is representable in an `f64`); everything else goes through
//! `statrs`' Lanczos approximation.

use statrs::function::gamma;

const EXACT_FACTORIALS: usize = 23;

const FACTORIALS: [f64; EXACT_FACTORIALS] = {
    let mut table = [1.0; EXACT_FACTORIALS];
    let mut i = 1;
    while i < EXACT_FACTORIALS {
        table[i] = table[i - 1] * i as f64;
        i += 1;
    }
    table
};

fn small_integer(x: f64) -> Option<usize> {
    if x >= 0.0 && x.fract() == 0.0 && x < EXACT_FACTORIALS as f64 {
        Some(x as usize)
    } else {
        None
    }
}

/// Gamma(n + 1) for real n > -1; exact for integers 0..=22.
pub fn factorial(n: f64) -> f64 {
    match small_integer(n) {
        Some(k) => FACTORIALS[k],
        None => gamma::gamma(n + 1.0),
    }
}

/// ln Gamma(n + 1) for real n > -1.
pub fn ln_factorial(n: f64) -> f64 {
    match small_integer(n) {
        Some(k) => FACTORIALS[k].ln(),
        None => gamma::ln_gamma(n + 1.0),
    }
}
