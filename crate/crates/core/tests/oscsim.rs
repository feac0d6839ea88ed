use sedplanck::oscsim::{energy_histogram, simulate_ensemble, simulate_trajectory, write_trajectory_csv, SimConfig};
use sedplanck::spectra::mean_energy;
use sedplanck::{OscillatorParams, SpectralDensity};

fn config(seed: u64, realizations: usize) -> SimConfig {
    let p = OscillatorParams::from_tau(1.0, 5e-3).unwrap();
    let mut cfg = SimConfig::new(p, seed);
    cfg.n_realizations = realizations;
    cfg
}

fn density(t: f64) -> SpectralDensity {
    if t == 0.0 {
        SpectralDensity::Zeropoint
    } else {
        SpectralDensity::total(t).unwrap()
    }
}

#[test]
fn variance_law_and_equipartition_across_temperatures() {
    for t in [0.0, 0.5, 1.0, 5.0] {
        let s = simulate_ensemble(&config(101, 80), &density(t)).unwrap();
        let ratio = s.variance_ratio();
        assert!((0.9..=1.1).contains(&ratio), "T = {t}: variance/mean^2 = {ratio}");
        let split = (s.kinetic_mean - s.potential_mean).abs() / s.mean;
        assert!(split < 0.05, "T = {t}: kinetic {} potential {}", s.kinetic_mean, s.potential_mean);
        let want = mean_energy(1.0, t).unwrap();
        assert!((s.mean / want - 1.0).abs() < 0.05, "T = {t}: mean {} vs {want}", s.mean);
        assert!(s.variance >= 0.0 && s.mean_std_error > 0.0 && s.variance_std_error > 0.0);
    }
}

#[test]
fn halving_the_step_barely_moves_the_mean() {
    let cfg = config(7, 20);
    let mut fine = cfg;
    fine.dt = cfg.dt / 2.0;
    let a = simulate_ensemble(&cfg, &SpectralDensity::Zeropoint).unwrap();
    let b = simulate_ensemble(&fine, &SpectralDensity::Zeropoint).unwrap();
    assert!(b.dt < a.dt);
    assert!((a.mean / b.mean - 1.0).abs() < 1e-2, "{} vs {}", a.mean, b.mean);
}

#[test]
fn identical_configs_give_identical_stats() {
    let cfg = config(31, 6);
    let rho = SpectralDensity::total(1.0).unwrap();
    assert_eq!(simulate_ensemble(&cfg, &rho).unwrap(), simulate_ensemble(&cfg, &rho).unwrap());
    let pool = rayon::ThreadPoolBuilder::new().num_threads(3).build().unwrap();
    let threaded = pool.install(|| simulate_ensemble(&cfg, &rho).unwrap());
    assert_eq!(threaded, simulate_ensemble(&cfg, &rho).unwrap());
}

// Oracle for the stationary law: with Gaussian x and v of equal energy
// share, eps = (X^2 + Y^2) mean/2 is exponential with the same mean.
#[test]
fn energy_distribution_is_exponential() {
    let (stats, h) = energy_histogram(&config(55, 40), &SpectralDensity::Zeropoint, 60).unwrap();
    let width = h.edges[1] - h.edges[0];
    let integral: f64 = h.density.iter().map(|d| d * width).sum();
    assert!((integral - 1.0).abs() < 1e-9);
    assert!(h.density.iter().all(|&d| d >= 0.0));
    assert!((h.fitted_rate * h.sample_mean - 1.0).abs() < 0.1, "rate {} mean {}", h.fitted_rate, h.sample_mean);
    assert!((h.fraction_below_mean - (1.0 - (-1.0f64).exp())).abs() < 0.03);
    assert!((h.sample_mean / stats.mean - 1.0).abs() < 0.05);
}

#[test]
fn unstable_step_is_rejected() {
    let mut cfg = config(1, 1);
    cfg.dt = 0.2;
    let err = simulate_ensemble(&cfg, &SpectralDensity::Zeropoint).unwrap_err();
    assert!(err.to_string().contains("dt"), "{err}");
}

#[test]
fn trajectory_export() {
    let mut cfg = config(3, 1);
    cfg.t_measure = 10.0 / cfg.damping_rate();
    let traj = simulate_trajectory(&cfg, &SpectralDensity::Zeropoint, 0, 500).unwrap();
    assert_eq!(traj[0].t, 0.0);
    assert!(traj.windows(2).all(|w| w[1].t > w[0].t));
    let mut buf = Vec::new();
    write_trajectory_csv(&traj, &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    assert!(text.starts_with("t,x,v,eps\n"));
    assert_eq!(text.lines().count(), traj.len() + 1);
}
