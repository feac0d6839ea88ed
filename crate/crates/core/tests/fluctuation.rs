use proptest::prelude::*;
use sedplanck::fluctuation::{solve_mean_energy, variance_residual, variance_residual_fd, OdeSolveConfig};
use sedplanck::spectra::mean_energy;
use sedplanck::Error;

#[test]
fn solution_tracks_closed_form_along_the_way() {
    let sol = solve_mean_energy(1.0, &OdeSolveConfig::asymptotic(1.0, 0.05, 5.0, 1e-11)).unwrap();
    for &(t, e) in sol.points.iter().filter(|p| p.0 > 0.2) {
        let want = mean_energy(1.0, t).unwrap();
        assert!((e / want - 1.0).abs() < 1e-6, "T = {t}");
    }
}

#[test]
fn tighter_tolerance_moves_less_than_reported_error() {
    let loose = solve_mean_energy(1.0, &OdeSolveConfig::asymptotic(1.0, 0.05, 1.0, 1e-8)).unwrap();
    let tight = solve_mean_energy(1.0, &OdeSolveConfig::asymptotic(1.0, 0.05, 1.0, 5e-9)).unwrap();
    let moved = (loose.final_energy() - tight.final_energy()).abs();
    assert!(moved <= loose.error_estimate, "{moved} vs {}", loose.error_estimate);
}

#[test]
fn perturbed_starts_leave_the_coth_branch() {
    let exact = OdeSolveConfig::asymptotic(1.0, 0.05, 1.0, 1e-10);
    let reference = solve_mean_energy(1.0, &exact).unwrap().final_energy();

    // +1% of the start energy: the excess thermal energy grows without bound
    let mut up = exact;
    up.initial_energy *= 1.01;
    match solve_mean_energy(1.0, &up) {
        Ok(sol) => assert!(sol.final_energy() > 10.0 * reference),
        Err(e) => assert!(matches!(e, Error::StepUnderflow { .. }), "{e}"),
    }

    // -1% falls below omega/2 at once
    let mut down = exact;
    down.initial_energy *= 0.99;
    assert!(matches!(solve_mean_energy(1.0, &down), Err(Error::Unphysical { .. })));

    // a small thermal perturbation stays physical but misses the closed form
    let mut nudged = exact;
    nudged.initial_energy = 0.5 + 1.01 * (exact.initial_energy - 0.5);
    let got = solve_mean_energy(1.0, &nudged).unwrap().final_energy();
    assert!((got - reference).abs() > 1e-4);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(50))]

    #[test]
    fn closed_form_satisfies_relation(omega in 0.1f64..10.0, ratio in 0.05f64..20.0) {
        let t = ratio * omega;
        prop_assert!(variance_residual(omega, t).unwrap() < 1e-12);
        prop_assert!(variance_residual_fd(omega, t, 1e-5).unwrap() < 1e-6);
    }

    #[test]
    fn half_omega_is_stationary(omega in 0.1f64..10.0, t0 in 0.05f64..2.0) {
        let cfg = OdeSolveConfig { t_start: t0, t_end: t0 * 3.0, initial_energy: 0.5 * omega, rel_tol: 1e-8 };
        let sol = solve_mean_energy(omega, &cfg).unwrap();
        prop_assert!(sol.points.iter().all(|p| p.1 == 0.5 * omega));
    }
}
