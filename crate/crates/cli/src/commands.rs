use std::fs::File;
use std::io::{BufWriter, Write};
use std::sync::Arc;

use sedplanck::counting::{probability_exact, probability_mc, EnergyPartition};
use sedplanck::fieldsynth::{correlation_ensemble, correlation_model, ModeGrid, WeightMode};
use sedplanck::fluctuation::{solve_mean_energy, variance_residual, OdeSolveConfig};
use sedplanck::oscsim::{energy_histogram, simulate_ensemble, simulate_trajectory, write_trajectory_csv, SimConfig};
use sedplanck::resonance::{mean_energy_integral, narrow_resonance_value};
use sedplanck::spectra::{mean_energy, rho_total};
use sedplanck::thermo::{entropy_star, entropy_star_derivative, thermodynamic_limit_run, ThermoLimitConfig};
use sedplanck::{OscillatorParams, QuadratureConfig, SpectralDensity};

use crate::args::*;
use crate::error::CliError;
use crate::table::{Cell, Table};

type Out = Result<Table, CliError>;

fn invalid<T>(msg: impl Into<String>) -> Result<T, CliError> {
    Err(CliError::Invalid(msg.into()))
}

fn density(kind: DensityKind, temp_ratio: f64) -> Result<SpectralDensity, CliError> {
    Ok(match kind {
        DensityKind::Zeropoint => SpectralDensity::Zeropoint,
        DensityKind::Thermal => SpectralDensity::thermal(temp_ratio)?,
        DensityKind::Total => SpectralDensity::total(temp_ratio)?,
    })
}

fn grid(lo: f64, hi: f64, points: usize, log: bool) -> Result<Vec<f64>, CliError> {
    if points == 0 {
        return invalid("need at least one grid point");
    }
    if !(hi >= lo) || !lo.is_finite() || !hi.is_finite() {
        return invalid(format!("invalid range [{lo}, {hi}]"));
    }
    if log && !(lo > 0.0) {
        return invalid("a geometric grid needs a positive lower end");
    }
    if points == 1 {
        return Ok(vec![lo]);
    }
    let last = (points - 1) as f64;
    Ok((0..points)
        .map(|i| {
            let f = i as f64 / last;
            if log {
                lo * (hi / lo).powf(f)
            } else {
                lo + (hi - lo) * f
            }
        })
        .collect())
}

pub fn spectrum(a: &SpectrumArgs) -> Out {
    let xs = grid(a.x_min, a.x_max, a.points, a.log)?;
    if xs[0] <= 0.0 {
        return invalid("x = omega/T must be positive");
    }
    let pi2 = std::f64::consts::PI.powi(2);
    let mut t = Table::new(&["x", "mean_energy_over_omega", "rho_total_scaled"]);
    for x in xs {
        let temp = 1.0 / x;
        t.push(vec![
            x.into(),
            mean_energy(1.0, temp)?.into(),
            (rho_total(1.0, temp)? * 2.0 * pi2).into(),
        ]);
    }
    Ok(t)
}

pub fn resonance(a: &ResonanceArgs) -> Out {
    let rho = density(a.density, a.temp_ratio)?;
    let mut t = Table::new(&[
        "tau",
        "temp_ratio",
        "integral",
        "error_estimate",
        "narrow_value",
        "rel_deviation",
        "evals",
    ]);
    for &tau in &a.tau {
        let p = OscillatorParams::from_tau(1.0, tau)?;
        let cfg = QuadratureConfig {
            omega_max: a.cutoff_ratio,
            wing_halfwidths: a.wing_halfwidths,
            rel_tol: a.rel_tol,
            max_evals: a.max_evals,
        };
        let r = mean_energy_integral(&p, &rho, &cfg)?;
        let narrow = narrow_resonance_value(&p, &rho)?;
        t.push(vec![
            tau.into(),
            a.temp_ratio.into(),
            r.value.into(),
            r.error.into(),
            narrow.into(),
            ((r.value - narrow) / narrow).into(),
            r.evals.into(),
        ]);
    }
    Ok(t)
}

pub fn field_sim(a: &FieldSimArgs, seed: u64) -> Out {
    let rho = density(a.density, a.temp_ratio)?;
    let times = grid(0.0, a.t_max, a.t_points, false)?;
    let g = Arc::new(ModeGrid::new(&rho, 0.0, a.omega_max, a.modes)?);
    if a.trajectory {
        let table = g.realize(seed, 0);
        let mut t = Table::new(&["t", "Ex", "Ey", "Ez"]);
        for &time in &times {
            let e = table.field(time);
            t.push(vec![time.into(), e[0].into(), e[1].into(), e[2].into()]);
        }
        return Ok(t);
    }
    if a.realizations == 0 {
        return invalid("need at least one realization");
    }
    let c = correlation_ensemble(&g, seed, a.realizations, &times)?;
    let mut t = Table::new(&["t", "correlation", "std_error", "model", "mean_ex", "mean_ey", "mean_ez"]);
    for (i, &time) in times.iter().enumerate() {
        let m = c.mean_field[i];
        t.push(vec![
            time.into(),
            c.values[i].into(),
            c.std_errors[i].into(),
            correlation_model(&rho, a.omega_max, time)?.into(),
            m[0].into(),
            m[1].into(),
            m[2].into(),
        ]);
    }
    Ok(t)
}

pub fn osc_sim(a: &OscSimArgs, seed: u64) -> Out {
    let rho = density(a.density, a.temp_ratio)?;
    let p = OscillatorParams::from_tau(1.0, a.tau)?;
    let gamma = p.damping_rate();
    let cfg = SimConfig {
        params: p,
        dt: a.dt,
        t_relax: a.relax / gamma,
        t_measure: a.measure / gamma,
        n_realizations: a.realizations,
        seed,
        band_end: a.band,
        modes_per_width: a.modes_per_width,
    };
    let mut columns = vec![
        "tau",
        "temp_ratio",
        "mean",
        "mean_std_error",
        "variance",
        "variance_std_error",
        "variance_ratio",
        "expected_mean",
        "kinetic_mean",
        "potential_mean",
        "n_samples",
        "dt",
    ];
    let (stats, hist) = match &a.histogram {
        Some(_) => {
            let (s, h) = energy_histogram(&cfg, &rho, a.bins)?;
            (s, Some(h))
        }
        None => (simulate_ensemble(&cfg, &rho)?, None),
    };
    let mut row: Vec<Cell> = vec![
        a.tau.into(),
        a.temp_ratio.into(),
        stats.mean.into(),
        stats.mean_std_error.into(),
        stats.variance.into(),
        stats.variance_std_error.into(),
        stats.variance_ratio().into(),
        narrow_resonance_value(&p, &rho)?.into(),
        stats.kinetic_mean.into(),
        stats.potential_mean.into(),
        stats.n_samples.into(),
        stats.dt.into(),
    ];
    if let (Some(h), Some(path)) = (&hist, &a.histogram) {
        columns.extend(["fitted_rate", "fraction_below_mean"]);
        row.extend([h.fitted_rate.into(), h.fraction_below_mean.into()]);
        let mut t = Table::new(&["lo", "hi", "count", "density"]);
        for (i, (&c, &d)) in h.counts.iter().zip(&h.density).enumerate() {
            t.push(vec![h.edges[i].into(), h.edges[i + 1].into(), c.into(), d.into()]);
        }
        std::fs::write(path, t.render(Format::Csv))?;
    }
    if let Some(path) = &a.trajectory_out {
        let traj = simulate_trajectory(&cfg, &rho, 0, a.trajectory_stride)?;
        let mut w = BufWriter::new(File::create(path)?);
        write_trajectory_csv(&traj, &mut w)?;
        w.flush()?;
    }
    let mut t = Table::new(&columns);
    t.push(row);
    Ok(t)
}

pub fn fluctuation(a: &FluctuationArgs) -> Out {
    let mut cfg = OdeSolveConfig::asymptotic(1.0, a.t_start, a.t_end, a.rel_tol);
    if let Some(e) = a.initial {
        cfg.initial_energy = e;
    }
    let sol = solve_mean_energy(1.0, &cfg)?;
    let mut t = Table::new(&["T", "mean_energy", "closed_form", "rel_diff", "closed_form_residual"]);
    for &(temp, e) in &sol.points {
        let exact = mean_energy(1.0, temp)?;
        t.push(vec![
            temp.into(),
            e.into(),
            exact.into(),
            ((e - exact) / exact).into(),
            variance_residual(1.0, temp)?.into(),
        ]);
    }
    log::info!("error estimate {} after {} rejected steps", sol.error_estimate, sol.rejected_steps);
    Ok(t)
}

pub fn counting(a: &CountingArgs, seed: u64) -> Out {
    let exact = probability_exact(a.oscillators, a.fractions)?;
    let occ = match &a.occ {
        Some(v) => v.clone(),
        None => vec![a.fractions as f64 / a.oscillators as f64; a.oscillators as usize],
    };
    if occ.len() as u64 != a.oscillators {
        return invalid(format!("--occ has {} entries but A = {}", occ.len(), a.oscillators));
    }
    let label = occ.iter().map(|n| n.to_string()).collect::<Vec<_>>().join(";");
    let mut t = Table::new(&["A", "N", "occupations", "exact", "mc", "std_error", "z_score", "samples"]);
    let mode = match a.weights {
        Weights::Flat => WeightMode::FlatSimplex,
        Weights::Field => WeightMode::FieldEnergy,
    };
    let (mc, se) = if a.fractions == 0 {
        if occ.iter().any(|&n| n != 0.0) {
            return invalid("occupations must all be zero when N = 0");
        }
        (f64::NAN, f64::NAN)
    } else {
        let partition = EnergyPartition::from_occupations(occ, 1.0)?;
        if partition.fractions() != a.fractions {
            return invalid(format!("occupations sum to {} but N = {}", partition.fractions(), a.fractions));
        }
        let r = probability_mc(&partition, a.samples, seed, mode)?;
        (r.probability, r.std_error.unwrap_or(f64::NAN))
    };
    t.push(vec![
        a.oscillators.into(),
        a.fractions.into(),
        label.into(),
        exact.probability.into(),
        mc.into(),
        se.into(),
        ((mc - exact.probability) / se).into(),
        a.samples.into(),
    ]);
    Ok(t)
}

pub fn entropy(a: &EntropyArgs) -> Out {
    let rs = grid(a.r_min, a.r_max, a.points, false)?;
    let mut t = Table::new(&["r", "s_star", "ds_dr", "temp_ratio"]);
    for r in rs {
        let (d, temp) = if r > 0.0 {
            let d = entropy_star_derivative(r)?;
            (d, 1.0 / d)
        } else {
            (f64::INFINITY, 0.0)
        };
        t.push(vec![r.into(), entropy_star(r)?.into(), d.into(), temp.into()]);
    }
    Ok(t)
}

pub fn limit(a: &LimitArgs, seed: u64) -> Out {
    let mut t = Table::new(&[
        "A",
        "trials",
        "mean_q",
        "spread_q",
        "S_star_error",
        "S_star_error_naive",
        "resampled",
    ]);
    for &count in &a.oscillators {
        let mut cfg = ThermoLimitConfig::new(count, 1.0, a.temp_ratio, a.trials, seed);
        cfg.fraction_ratio = a.fraction_ratio;
        cfg.fluctuation_scale = a.fluct_scale;
        let r = thermodynamic_limit_run(&cfg)?;
        t.push(vec![
            r.oscillators.into(),
            r.trials.into(),
            r.mean_q.into(),
            r.spread_q.into(),
            r.s_star_error.into(),
            r.s_star_error_naive.into(),
            r.resampled.into(),
        ]);
    }
    Ok(t)
}
