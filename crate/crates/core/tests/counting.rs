use num_rational::Ratio;
use proptest::prelude::*;
use sedplanck::counting::{
    partition_from_energies, probability_exact, probability_exact_ratio, probability_mc, weak_compositions,
    EnergyPartition,
};
use sedplanck::fieldsynth::WeightMode;
use sedplanck::special::factorial;

fn flat(occ: &[f64], seed: u64) -> sedplanck::counting::ProbabilityResult {
    let p = EnergyPartition::from_occupations(occ.to_vec(), 1.0).unwrap();
    probability_mc(&p, 200_000, seed, WeightMode::FlatSimplex).unwrap()
}

// Beta-integral oracle for A = 2: P = N! int_0^1 a^n1 (1-a)^n2 da / (n1! n2!).
fn two_site_oracle(n1: u64, n2: u64) -> f64 {
    let steps = 200_000;
    let h = 1.0 / steps as f64;
    let integral: f64 = (0..steps)
        .map(|i| {
            let a = (i as f64 + 0.5) * h;
            a.powi(n1 as i32) * (1.0 - a).powi(n2 as i32)
        })
        .sum::<f64>()
        * h;
    factorial((n1 + n2) as f64) * integral / (factorial(n1 as f64) * factorial(n2 as f64))
}

#[test]
fn exact_matches_beta_integral() {
    for (n1, n2) in [(3, 0), (2, 1), (1, 1), (4, 2), (0, 5)] {
        let exact = probability_exact(2, n1 + n2).unwrap().probability;
        assert!((exact - two_site_oracle(n1, n2)).abs() < 1e-8, "({n1}, {n2})");
    }
}

#[test]
fn spec_examples_by_monte_carlo() {
    for (occ, want) in [
        (vec![3.0, 0.0], 0.25),
        (vec![1.5, 1.5], 0.25),
        (vec![2.0, 0.0, 0.0], 1.0 / 6.0),
    ] {
        let r = flat(&occ, 42);
        let se = r.std_error.unwrap();
        assert!(se > 0.0);
        assert!((r.probability - want).abs() < 3.0 * se, "{occ:?}: {} +- {se}", r.probability);
    }
}

#[test]
fn occupation_vectors_agree_pairwise() {
    let vectors = [
        vec![4.0, 0.0, 0.0],
        vec![2.0, 1.0, 1.0],
        vec![1.5, 1.5, 1.0],
        vec![0.25, 3.25, 0.5],
        vec![4.0 / 3.0, 4.0 / 3.0, 4.0 / 3.0],
    ];
    let exact = probability_exact(3, 4).unwrap().probability;
    let results: Vec<_> = vectors.iter().map(|v| flat(v, 9)).collect();
    for (i, a) in results.iter().enumerate() {
        let sa = a.std_error.unwrap();
        assert!((a.probability - exact).abs() < 3.0 * sa, "{:?}", vectors[i]);
        for b in &results[i + 1..] {
            let combined = sa.hypot(b.std_error.unwrap());
            assert!((a.probability - b.probability).abs() < 3.0 * combined);
        }
    }
}

#[test]
fn field_energy_weights_deviate() {
    // concentrated occupations are suppressed under Dirichlet(3/2) weights
    let p = EnergyPartition::from_occupations(vec![3.0, 0.0], 1.0).unwrap();
    let r = probability_mc(&p, 200_000, 4, WeightMode::FieldEnergy).unwrap();
    let exact = probability_exact(2, 3).unwrap().probability;
    assert!((r.probability - exact).abs() > 10.0 * r.std_error.unwrap());
}

#[test]
fn thread_count_does_not_change_estimates() {
    let p = EnergyPartition::from_occupations(vec![1.0, 2.5, 0.5], 0.2).unwrap();
    let serial = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
    let parallel = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
    let a = serial.install(|| probability_mc(&p, 100_000, 8, WeightMode::FlatSimplex).unwrap());
    let b = parallel.install(|| probability_mc(&p, 100_000, 8, WeightMode::FlatSimplex).unwrap());
    assert_eq!(a, b);
}

#[test]
fn compositions_normalize_exactly() {
    for a in 1..=5u64 {
        for n in 0..=8u64 {
            let count = weak_compositions(a as usize, n).len() as u128;
            let p = probability_exact_ratio(a, n).unwrap();
            assert_eq!(p * Ratio::from_integer(count), Ratio::from_integer(1), "A = {a}, N = {n}");
        }
    }
}

#[test]
fn gamma_is_exact_on_integers() {
    let mut f = 1.0f64;
    for n in 1..=20u32 {
        f *= n as f64;
        assert_eq!(factorial(n as f64), f);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn partition_sums_to_fraction_count(u in prop::collection::vec(0.0f64..10.0, 1..12), n in 1u64..200) {
        prop_assume!(u.iter().sum::<f64>() > 1e-6);
        let p = partition_from_energies(&u, n).unwrap();
        let total: f64 = p.occupations().iter().sum();
        prop_assert!((total - n as f64).abs() <= 1e-12 * n as f64);
        let u_sum: f64 = u.iter().sum();
        prop_assert!((p.fraction_size() * n as f64 - u_sum).abs() <= 1e-12 * u_sum);
        prop_assert!((p.site_energies().iter().sum::<f64>() - u_sum).abs() <= 1e-12 * u_sum);
    }

    #[test]
    fn exact_probability_is_a_probability(a in 1u64..3000, n in 0u64..3000) {
        let p = probability_exact(a, n).unwrap();
        prop_assert!(p.log_probability <= 1e-12);
        prop_assert!((0.0..=1.0).contains(&p.probability));
    }
}
