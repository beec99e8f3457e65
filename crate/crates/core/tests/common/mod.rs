#![allow(dead_code)]

use cavity_store::prelude::*;
use rand::Rng;

/// Samples an analytic envelope onto `[0, end]` with spacing `h` and loads it
/// as a tabulated pulse.
pub fn tabulate(shape: &PulseShape, end: f64, h: f64) -> PulseShape {
    let n = (end / h).round() as usize;
    let records: Vec<(f64, f64)> = (0..=n)
        .map(|i| {
            let t = i as f64 * h;
            (t, shape.amplitude(t))
        })
        .collect();
    load_tabulated(&records).expect("sampled analytic pulse loads").0
}

pub fn fig2a() -> (PulseShape, SystemConfig) {
    let shape = PulseShape::gaussian_from_linewidth(1.0, 20.0, 5.0).unwrap();
    let config = SystemConfig::for_pulse(&shape, 1.0).unwrap();
    (shape, config)
}

pub fn fig2b_sech(n_p: f64) -> (PulseShape, SystemConfig) {
    // κβ = 10, T = 10β
    let shape = PulseShape::sech(100.0, 10.0).unwrap();
    let config = SystemConfig::for_pulse(&shape, 1.0)
        .unwrap()
        .with_photons(n_p)
        .unwrap();
    (shape, config)
}

#[derive(Debug, Clone)]
pub struct RandomRun {
    pub shape: PulseShape,
    pub errors: ErrorModel,
    pub kappa_tp: f64,
    pub label: String,
}

/// A random pulse from one of the three families with κ = 1 and
/// `κ t_p ∈ [10, 40]`, paired with an error model inside the sweep ranges.
/// Draws are repeated until the ideal coupling synthesizes cleanly.
pub fn random_run<R: Rng>(rng: &mut R) -> RandomRun {
    loop {
        let kappa_tp = rng.random_range(10.0..40.0);
        let family = rng.random_range(0..3);
        let analytic = if family == 1 || (family == 2 && rng.random_bool(0.5)) {
            PulseShape::sech_from_linewidth(1.0, kappa_tp, rng.random_range(10.0..14.0)).unwrap()
        } else {
            PulseShape::gaussian_from_linewidth(1.0, kappa_tp, rng.random_range(5.0..7.0)).unwrap()
        };
        let shape = if family == 2 {
            tabulate(&analytic, analytic.support_end(), 0.05)
        } else {
            analytic
        };
        let errors = match rng.random_range(0..3) {
            0 => ErrorModel::IDEAL,
            1 => ErrorModel::amplitude(rng.random_range(0.8..1.2)).unwrap(),
            _ => ErrorModel::delay(rng.random_range(-0.2..0.2) * shape.duration()).unwrap(),
        };
        let config = run_config(&shape, &errors, 1e-3);
        let Ok(profile) = synthesize_profile(&shape, &config) else {
            continue;
        };
        if !profile.validity().ok {
            continue;
        }
        let label = format!(
            "{} kappa_tp={kappa_tp:.3} g0={:.4} tau={:.4}",
            shape.family(),
            errors.g0,
            errors.tau
        );
        return RandomRun {
            shape,
            errors,
            kappa_tp,
            label,
        };
    }
}

/// Grid with `κ = 1`, step `dt` and the horizon extended by `|τ|`.
pub fn run_config(shape: &PulseShape, errors: &ErrorModel, dt: f64) -> SystemConfig {
    SystemConfig::new(1.0, shape.support_end() + errors.tau.abs(), dt, 1.0).unwrap()
}

pub fn simulate(shape: &PulseShape, errors: &ErrorModel, dt: f64) -> Trajectory {
    let config = run_config(shape, errors, dt);
    let profile = synthesize_profile(shape, &config).unwrap();
    integrate(shape, &config, &profile, errors).unwrap()
}
