use sedplanck::resonance::{mean_energy_integral, narrow_resonance_error, narrow_resonance_value};
use sedplanck::{OscillatorParams, QuadratureConfig, SpectralDensity, TabulatedDensity};

fn params(tau: f64) -> OscillatorParams {
    OscillatorParams::from_tau(1.0, tau).unwrap()
}

#[test]
fn refinement_stays_within_error_estimate() {
    for rho in [SpectralDensity::Zeropoint, SpectralDensity::total(0.7).unwrap()] {
        let p = params(1e-4);
        let cfg = QuadratureConfig::for_oscillator(&p);
        let coarse = mean_energy_integral(&p, &rho, &cfg).unwrap();
        let fine_cfg = QuadratureConfig {
            rel_tol: cfg.rel_tol / 2.0,
            max_evals: cfg.max_evals * 2,
            ..cfg
        };
        let fine = mean_energy_integral(&p, &rho, &fine_cfg).unwrap();
        assert!(
            (fine.value - coarse.value).abs() <= coarse.error,
            "{coarse:?} vs {fine:?}"
        );
    }
}

#[test]
fn deviation_is_first_order_in_tau() {
    let rho = SpectralDensity::Zeropoint;
    let mut logs = Vec::new();
    for tau in [1e-6, 1e-5, 1e-4, 1e-3] {
        let p = params(tau);
        let err = narrow_resonance_error(&p, &rho, &QuadratureConfig::for_oscillator(&p)).unwrap();
        assert!(err / tau < 20.0, "tau = {tau}: err = {err}");
        logs.push((tau.ln(), err.ln()));
    }
    let slope = (logs[3].1 - logs[0].1) / (logs[3].0 - logs[0].0);
    assert!((slope - 1.0).abs() < 0.05, "slope {slope}");
}

#[test]
fn cutoff_drift_is_small() {
    let p = params(1e-4);
    let rho = SpectralDensity::Zeropoint;
    let mut cfg = QuadratureConfig::for_oscillator(&p);
    cfg.omega_max = 10.0;
    let near = mean_energy_integral(&p, &rho, &cfg).unwrap().value;
    cfg.omega_max = 100.0;
    let far = mean_energy_integral(&p, &rho, &cfg).unwrap().value;
    assert!((far - near).abs() / far < 1e-2);
    // the far wing only adds
    assert!(far > near);
}

fn simpson<F: Fn(f64) -> f64>(f: F, a: f64, b: f64, n: usize) -> f64 {
    let step = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let x = a + i as f64 * step;
        sum += if i % 2 == 1 { 4.0 * f(x) } else { 2.0 * f(x) };
    }
    sum * step / 3.0
}

// Independent oracle: w = omega + h tan(theta), h the half width, on the
// core |w - omega| < 1000 h and w = omega +- e^s on the wings make every
// piece smooth for composite Simpson.
fn simpson_tan_oracle(p: &OscillatorParams, value: f64, omega_max: f64) -> f64 {
    let omega = p.omega();
    let kappa = p.radiation_coefficient();
    let h = 0.5 * p.damping_rate();
    let g = |w: f64| {
        let d = w * w - omega * omega;
        let width = kappa * w * w * w;
        value / (d * d + width * width)
    };
    let core_edge = 1000.0 * h;
    let theta_max = 1000f64.atan();
    let n = 400_000;
    let core = simpson(
        |theta: f64| g(omega + h * theta.tan()) * h / (theta.cos() * theta.cos()),
        -theta_max,
        theta_max,
        n,
    );
    let right = simpson(|s: f64| g(omega + s.exp()) * s.exp(), core_edge.ln(), (omega_max - omega).ln(), n);
    let left = simpson(|s: f64| g(omega - s.exp()) * s.exp(), core_edge.ln(), omega.ln(), n);
    2.0 * std::f64::consts::PI * kappa * omega * omega * (core + left + right)
}

#[test]
fn flat_density_matches_simpson_oracle() {
    for tau in [1e-5, 1e-3] {
        let p = params(tau);
        let rho = SpectralDensity::Tabulated(TabulatedDensity::flat(0.0, 100.0, 0.3).unwrap());
        let got = mean_energy_integral(&p, &rho, &QuadratureConfig::for_oscillator(&p)).unwrap();
        let oracle = simpson_tan_oracle(&p, 0.3, 100.0);
        assert!((got.value / oracle - 1.0).abs() < 1e-8, "{} vs {oracle}", got.value);
        // flat density: the narrow value is pi^2 c / omega^2
        let narrow = narrow_resonance_value(&p, &rho).unwrap();
        assert!((narrow - std::f64::consts::PI.powi(2) * 0.3).abs() < 1e-12);
    }
}

#[test]
fn scales_with_density_linearly() {
    let p = params(1e-4);
    let cfg = QuadratureConfig::for_oscillator(&p);
    let one = SpectralDensity::Tabulated(TabulatedDensity::flat(0.0, 100.0, 1.0).unwrap());
    let three = SpectralDensity::Tabulated(TabulatedDensity::flat(0.0, 100.0, 3.0).unwrap());
    let a = mean_energy_integral(&p, &one, &cfg).unwrap().value;
    let b = mean_energy_integral(&p, &three, &cfg).unwrap().value;
    assert!((b / a - 3.0).abs() < 1e-9);
}
