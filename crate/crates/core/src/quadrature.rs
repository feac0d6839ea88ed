//! Globally adaptive Gauss-Kronrod (7, 15) quadrature.
//!
//! The error estimate of a panel is the difference between its Kronrod and
//! embedded Gauss sums. The panel with the largest estimate is bisected
//! until the summed estimate meets the tolerance or the budget runs out.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];

const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

pub const EVALS_PER_PANEL: usize = 15;

/// Value and error estimate of a definite integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    pub evals: usize,
}

#[derive(Debug, Clone, Copy)]
struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Panel {}

impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        // Ties broken on position so the refinement order is reproducible.
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> Panel {
    let centre = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let fc = f(centre);
    let mut kronrod = WGK[7] * fc;
    let mut gauss = WG[3] * fc;
    for j in 0..7 {
        let dx = half * XGK[j];
        let pair = f(centre - dx) + f(centre + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    Panel {
        a,
        b,
        value: kronrod * half,
        error: ((kronrod - gauss) * half).abs(),
    }
}

/// Tolerances and budget for [`integrate`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
    pub max_evals: usize,
}

/// Integrates `f` over the consecutive intervals defined by `breaks`
/// (at least two strictly increasing points).
///
/// Convergence is declared when the summed error estimate drops below
/// `max(abs, rel * |value|)`. Running out of budget returns
/// [`Error::QuadratureBudget`] carrying the best estimate.
pub fn integrate<F>(mut f: F, breaks: &[f64], tol: Tolerance) -> Result<Estimate>
where
    F: FnMut(f64) -> f64,
{
    if breaks.len() < 2 || breaks.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::Domain(
            "quadrature breakpoints must be strictly increasing".into(),
        ));
    }
    if !(tol.rel > 0.0) && !(tol.abs > 0.0) {
        return Err(Error::Domain("quadrature tolerance must be positive".into()));
    }

    let mut heap = BinaryHeap::with_capacity(breaks.len() * 4);
    let mut evals = 0;
    for w in breaks.windows(2) {
        heap.push(gk15(&mut f, w[0], w[1]));
        evals += EVALS_PER_PANEL;
    }

    let (mut value, mut error) = totals(&heap);
    loop {
        if !value.is_finite() {
            return Err(Error::Domain("integrand is not finite".into()));
        }
        let target = tol.abs.max(tol.rel * value.abs());
        if error <= target {
            // Confirm with an ordered re-sum; running totals drift slightly.
            let (v, e) = totals(&heap);
            (value, error) = (v, e);
            if e <= tol.abs.max(tol.rel * v.abs()) {
                return Ok(Estimate { value, error, evals });
            }
        }
        if evals + 2 * EVALS_PER_PANEL > tol.max_evals {
            let (value, error) = totals(&heap);
            return Err(Error::QuadratureBudget {
                estimate: value,
                error,
                requested: tol.abs.max(tol.rel * value.abs()),
                evals,
            });
        }
        let worst = heap.pop().expect("heap is never empty");
        let mid = 0.5 * (worst.a + worst.b);
        if mid <= worst.a || mid >= worst.b {
            // Panel cannot be split further in floating point; accept it.
            error -= worst.error;
            heap.push(Panel { error: 0.0, ..worst });
            continue;
        }
        let left = gk15(&mut f, worst.a, mid);
        let right = gk15(&mut f, mid, worst.b);
        value += left.value + right.value - worst.value;
        error += left.error + right.error - worst.error;
        heap.push(left);
        heap.push(right);
        evals += 2 * EVALS_PER_PANEL;
    }
}

fn totals(heap: &BinaryHeap<Panel>) -> (f64, f64) {
    let mut panels: Vec<&Panel> = heap.iter().collect();
    // fixed summation order, independent of heap layout
    panels.sort_by(|p, q| p.a.total_cmp(&q.a));
    panels
        .iter()
        .fold((0.0, 0.0), |(v, e), p| (v + p.value, e + p.error))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol(rel: f64) -> Tolerance {
        Tolerance {
            rel,
            abs: 0.0,
            max_evals: 100_000,
        }
    }

    #[test]
    fn polynomial_exact() {
        let est = integrate(|x| x.powi(5) - 3.0 * x * x, &[0.0, 2.0], tol(1e-14)).unwrap();
        assert!((est.value - (64.0 / 6.0 - 8.0)).abs() < 1e-13);
        assert_eq!(est.evals, EVALS_PER_PANEL);
    }

    #[test]
    fn narrow_lorentzian() {
        let a = 1e-6;
        let est = integrate(|x| a / (x * x + a * a), &[-1.0, 0.0, 1.0], tol(1e-12)).unwrap();
        let exact = 2.0 * (1.0 / a).atan();
        assert!((est.value / exact - 1.0).abs() < 1e-11, "{est:?}");
    }

    #[test]
    fn budget_exhaustion_reports_best_estimate() {
        let err = integrate(|x| x.sqrt().sin() / x.sqrt(), &[0.0, 100.0], Tolerance {
            rel: 1e-15,
            abs: 0.0,
            max_evals: 60,
        })
        .unwrap_err();
        match err {
            Error::QuadratureBudget { estimate, error, .. } => {
                assert!(estimate.is_finite() && error > 0.0)
            }
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn rejects_bad_breaks() {
        assert!(integrate(|x| x, &[1.0, 0.0], tol(1e-8)).is_err());
        assert!(integrate(|x| x, &[1.0], tol(1e-8)).is_err());
    }
}
