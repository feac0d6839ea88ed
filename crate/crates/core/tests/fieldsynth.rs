use std::f64::consts::PI;
use std::sync::Arc;

use proptest::prelude::*;
use sedplanck::fieldsynth::{
    correlation_empirical, correlation_ensemble, correlation_model, sample_weights, synthesize, ModeGrid, WeightMode,
};
use sedplanck::SpectralDensity;

// int_0^W w^3 cos(w t) dw / (2 pi^2), from the antiderivative.
fn zeropoint_cosine_transform(w_max: f64, t: f64) -> f64 {
    if t == 0.0 {
        return w_max.powi(4) / (8.0 * PI * PI);
    }
    let prim = |w: f64| {
        let (s, c) = (w * t).sin_cos();
        w.powi(3) * s / t + 3.0 * w * w * c / (t * t) - 6.0 * w * s / t.powi(3) - 6.0 * c / t.powi(4)
    };
    (prim(w_max) - prim(0.0)) / (2.0 * PI * PI)
}

#[test]
fn model_correlation_matches_closed_form() {
    let rho = SpectralDensity::Zeropoint;
    let scale = zeropoint_cosine_transform(5.0, 0.0);
    for i in 0..=40 {
        let t = i as f64 * 0.25;
        let got = correlation_model(&rho, 5.0, t).unwrap();
        let want = zeropoint_cosine_transform(5.0, t);
        assert!((got - want).abs() < 1e-10 * scale, "t = {t}: {got} vs {want}");
    }
}

#[test]
fn ensemble_correlation_tracks_cosine_transform() {
    let grid = Arc::new(ModeGrid::new(&SpectralDensity::Zeropoint, 0.0, 5.0, 500).unwrap());
    let times: Vec<f64> = (0..=20).map(|i| i as f64 * 0.5).collect();
    let corr = correlation_ensemble(&grid, 21, 2000, &times).unwrap();
    let scale = zeropoint_cosine_transform(5.0, 0.0);
    for (i, &t) in times.iter().enumerate() {
        let want = zeropoint_cosine_transform(5.0, t);
        let dev = (corr.values[i] - want).abs();
        assert!(dev < 4.0 * corr.std_errors[i] + 1e-3 * scale, "t = {t}: {} vs {want}", corr.values[i]);
        for j in 0..3 {
            assert!(corr.mean_field[i][j].abs() < 4.0 * corr.mean_field_errors[i][j]);
        }
    }
}

#[test]
fn correlation_is_even_in_time() {
    let grid = Arc::new(ModeGrid::new(&SpectralDensity::Zeropoint, 0.0, 5.0, 200).unwrap());
    let ensemble: Vec<_> = (0..200).map(|i| grid.realize(3, i)).collect();
    let times = [-2.5, -0.7, 0.7, 2.5];
    let corr = correlation_empirical(&ensemble, &times).unwrap();
    for k in 0..2 {
        let err = corr.std_errors[k].hypot(corr.std_errors[3 - k]);
        assert!((corr.values[k] - corr.values[3 - k]).abs() < 3.0 * err + 1e-12);
    }
}

#[test]
fn equal_time_correlation_is_total_power() {
    let grid = Arc::new(ModeGrid::new(&SpectralDensity::Zeropoint, 0.0, 5.0, 300).unwrap());
    let corr = correlation_ensemble(&grid, 8, 500, &[0.0]).unwrap();
    let power = zeropoint_cosine_transform(5.0, 0.0);
    assert!((corr.values[0] - power).abs() < 3.0 * corr.std_errors[0] + 1e-3 * power);
}

#[test]
fn field_is_nearly_gaussian() {
    let grid = Arc::new(ModeGrid::new(&SpectralDensity::Zeropoint, 0.0, 5.0, 500).unwrap());
    let xs: Vec<f64> = (0..10_000).map(|i| grid.realize(99, i).field(1.3)[0]).collect();
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let excess = m4 / (m2 * m2) - 3.0;
    assert!(excess.abs() < 0.1, "excess kurtosis {excess}");
}

#[test]
fn periodogram_ensemble_recovers_shape() {
    let grid = Arc::new(ModeGrid::new(&SpectralDensity::Zeropoint, 0.0, 4.0, 32).unwrap());
    let realizations = 200;
    let mut avg = vec![0.0; grid.len()];
    for i in 0..realizations {
        for (a, p) in avg.iter_mut().zip(grid.realize(5, i).periodogram(256)) {
            *a += p / realizations as f64;
        }
    }
    let want: Vec<f64> = grid.frequencies().iter().map(|&w| w.powi(3) / (2.0 * PI * PI)).collect();
    let num: f64 = avg.iter().zip(&want).map(|(a, w)| (a - w).powi(2)).sum();
    let den: f64 = want.iter().map(|w| w * w).sum();
    assert!((num / den).sqrt() < 0.05);
}

#[test]
fn trajectory_csv_has_header_and_rows() {
    let table = synthesize(&SpectralDensity::Zeropoint, 5.0, 50, 4).unwrap();
    let mut buf = Vec::new();
    table.write_trajectory_csv(&[0.0, 0.5, 1.0], &mut buf).unwrap();
    let text = String::from_utf8(buf).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "t,Ex,Ey,Ez");
    assert_eq!(lines.len(), 4);
    let ex: f64 = lines[2].split(',').nth(1).unwrap().parse().unwrap();
    assert_eq!(ex, table.field(0.5)[0]);
}

#[test]
fn flat_simplex_marginal_is_uniform() {
    let mut draws: Vec<f64> = (0..10_000)
        .map(|s| sample_weights(2, WeightMode::FlatSimplex, s).unwrap().alphas()[0])
        .collect();
    draws.sort_by(f64::total_cmp);
    let n = draws.len() as f64;
    let ks = draws
        .iter()
        .enumerate()
        .map(|(i, &x)| (x - i as f64 / n).abs().max(((i + 1) as f64 / n - x).abs()))
        .fold(0.0, f64::max);
    assert!(ks < 0.02, "KS statistic {ks}");
}

#[test]
fn field_energy_marginal_matches_direct_ratio() {
    use rand::SeedableRng;
    use rand_distr::{ChiSquared, Distribution};
    let draws: Vec<f64> = (0..10_000)
        .map(|s| sample_weights(2, WeightMode::FieldEnergy, s).unwrap().alphas()[0])
        .collect();
    let mean = draws.iter().sum::<f64>() / draws.len() as f64;
    assert!((mean - 0.5).abs() < 0.01);
    // oracle: ratio of chi-squared(3) draws has variance 1/16 (Beta(3/2, 3/2))
    let mut rng = rand_chacha::ChaCha20Rng::seed_from_u64(1);
    let chi = ChiSquared::new(3.0).unwrap();
    let oracle: Vec<f64> = (0..10_000)
        .map(|_| {
            let (a, b) = (chi.sample(&mut rng), chi.sample(&mut rng));
            a / (a + b)
        })
        .collect();
    let var = |xs: &[f64]| {
        let m = xs.iter().sum::<f64>() / xs.len() as f64;
        xs.iter().map(|x| (x - m).powi(2)).sum::<f64>() / xs.len() as f64
    };
    assert!((var(&draws) - var(&oracle)).abs() < 0.005);
    assert!((var(&oracle) - 1.0 / 16.0).abs() < 0.005);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn weights_are_valid(count in 1usize..40, seed in any::<u64>(), flat in any::<bool>()) {
        let mode = if flat { WeightMode::FlatSimplex } else { WeightMode::FieldEnergy };
        let w = sample_weights(count, mode, seed).unwrap();
        prop_assert!(w.alphas().iter().all(|a| (0.0..=1.0).contains(a)));
        prop_assert!((w.alphas().iter().sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(w, sample_weights(count, mode, seed).unwrap());
    }

    #[test]
    fn tables_are_reproducible(seed in any::<u64>(), n in 2usize..64) {
        let a = synthesize(&SpectralDensity::Zeropoint, 3.0, n, seed).unwrap();
        let b = synthesize(&SpectralDensity::Zeropoint, 3.0, n, seed).unwrap();
        prop_assert_eq!(a, b);
    }
}
