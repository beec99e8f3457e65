//! Synthesis of the inter-cavity coupling g(t) that absorbs the whole input
//! pulse into mode B with no reflected field.
//!
//! Imposing a vanishing output field pins mode A to `c_a = α_in / √(2κ)`;
//! the remaining equation for mode B then gives
//!
//! ```text
//! c_b(t) = ( ∫₀ᵗ α_in² dt' − α_in(t)² / (2κ) )^(1/2)
//! g(t)   = ( α_in'(t) − κ α_in(t) ) / ( √(2κ) c_b(t) )
//! ```
//!
//! Both depend on the envelope alone. A coherent input with mean photon
//! number `n_p` scales numerator and denominator by `√n_p`, so the coupling
//! is the same for every `n_p`.

use std::io::Write;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::output::{self, round_opt, round_sig};
use crate::pulse::PulseShape;
use crate::spline::CubicSpline;

/// Radicand values in `(-RADICAND_TOL, 0)` are round-off and clamp to zero.
pub const RADICAND_TOL: f64 = 1e-12;
/// Smallest stored amplitude the coupling formula divides by.
pub const DENOMINATOR_FLOOR: f64 = 1e-9;
/// g is switched off once `|g| < SWITCH_OFF_RATIO · max|g|` after the peak.
pub const SWITCH_OFF_RATIO: f64 = 1e-8;
/// Largest tolerated `α_in(0)² / (2κ)` for a valid profile.
pub const EDGE_DEFICIT_LIMIT: f64 = 1e-8;
/// Upper bound on `κ·dt`.
pub const MAX_KAPPA_DT: f64 = 1e-2;
/// Inside the edge region a numerator/denominator ratio above this many κ is
/// a genuine blow-up rather than two vanishing tails.
pub const DEGENERATE_RATIO: f64 = 1e3;
/// Default `κ·dt`.
pub const DEFAULT_KAPPA_DT: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SystemConfig {
    pub kappa: f64,
    pub t_end: f64,
    pub dt: f64,
    pub n_p: f64,
}

impl SystemConfig {
    pub fn new(kappa: f64, t_end: f64, dt: f64, n_p: f64) -> Result<Self> {
        let bad = |msg: String| Err(Error::InvalidConfig(msg));
        if !(kappa.is_finite() && kappa > 0.0) {
            return bad(format!("kappa must be positive, got {kappa}"));
        }
        if !(dt.is_finite() && dt > 0.0) {
            return bad(format!("dt must be positive, got {dt}"));
        }
        if !(t_end.is_finite() && t_end > dt) {
            return bad(format!("t_end must exceed dt, got t_end = {t_end}, dt = {dt}"));
        }
        if kappa * dt > MAX_KAPPA_DT * (1.0 + 1e-12) {
            return bad(format!("kappa*dt = {} exceeds {MAX_KAPPA_DT}", kappa * dt));
        }
        if !(n_p.is_finite() && n_p > 0.0) {
            return bad(format!("n_p must be positive, got {n_p}"));
        }
        Ok(SystemConfig { kappa, t_end, dt, n_p })
    }

    /// Default grid for a pulse: `κ·dt = 10⁻³`, horizon at the end of the
    /// pulse support, single photon.
    pub fn for_pulse(shape: &PulseShape, kappa: f64) -> Result<Self> {
        Self::new(kappa, shape.support_end(), DEFAULT_KAPPA_DT / kappa, 1.0)
    }

    pub fn with_t_end(self, t_end: f64) -> Result<Self> {
        Self::new(self.kappa, t_end, self.dt, self.n_p)
    }

    pub fn with_dt(self, dt: f64) -> Result<Self> {
        Self::new(self.kappa, self.t_end, dt, self.n_p)
    }

    pub fn with_photons(self, n_p: f64) -> Result<Self> {
        Self::new(self.kappa, self.t_end, self.dt, n_p)
    }

    /// Number of grid points, `t_i = i·dt` for `i = 0..len`.
    pub fn grid_len(&self) -> usize {
        (self.t_end / self.dt).round() as usize + 1
    }

    pub fn grid(&self) -> Vec<f64> {
        (0..self.grid_len()).map(|i| i as f64 * self.dt).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ValidityReport {
    /// Minimum of the stored-amplitude radicand over the whole grid.
    pub min_radicand: f64,
    /// Minimum of the radicand once mode B has left the initial edge region.
    pub min_radicand_after_edge: f64,
    /// `κ·t_p`.
    pub linewidth_ratio: f64,
    /// `α_in(0)² / (2κ)`: the radicand deficit caused by starting at `t = 0`.
    pub truncation_deficit: f64,
    /// First grid time at which `c_b` reaches the denominator floor.
    pub edge_end: Option<f64>,
    pub ok: bool,
}

/// The synthesized ideal coupling on the simulation grid.
#[derive(Debug, Clone)]
pub struct CouplingProfile {
    times: Vec<f64>,
    g_values: Vec<f64>,
    kappa: f64,
    dt: f64,
    switch_off_time: Option<f64>,
    switch_on_index: Option<usize>,
    max_abs_g: f64,
    clamped_max: f64,
    validity: ValidityReport,
    spline: CubicSpline,
}

impl CouplingProfile {
    pub fn times(&self) -> &[f64] {
        &self.times
    }

    pub fn g_values(&self) -> &[f64] {
        &self.g_values
    }

    pub fn kappa(&self) -> f64 {
        self.kappa
    }

    pub fn dt(&self) -> f64 {
        self.dt
    }

    pub fn switch_off_time(&self) -> Option<f64> {
        self.switch_off_time
    }

    pub fn max_abs_g(&self) -> f64 {
        self.max_abs_g
    }

    /// Largest `|g|` that the switch-off clamp replaced by zero.
    pub fn clamped_max(&self) -> f64 {
        self.clamped_max
    }

    pub fn validity(&self) -> &ValidityReport {
        &self.validity
    }

    /// g at an arbitrary time, read off the profile with the natural cubic
    /// spline. Zero outside the grid, before the coupling first turns on and
    /// from the switch-off time onwards.
    pub fn value_at(&self, t: f64) -> f64 {
        let Some(on) = self.switch_on_index else {
            return 0.0;
        };
        if t < self.times[on.saturating_sub(1)] {
            return 0.0;
        }
        if self.switch_off_time.is_some_and(|off| t >= off) {
            return 0.0;
        }
        self.spline.value(t).unwrap_or(0.0)
    }

    pub fn write_csv<W: Write>(&self, out: W, magnitude: bool) -> Result<()> {
        let rows = self.times.iter().zip(&self.g_values).map(|(&t, &g)| {
            vec![t, if magnitude { g.abs() } else { g }]
        });
        output::write_csv(out, "t,g", rows)
    }

    pub fn sidecar(&self) -> ProfileSidecar {
        ProfileSidecar {
            switch_off_time: round_opt(self.switch_off_time),
            min_radicand: round_sig(self.validity.min_radicand),
            linewidth_ratio: round_sig(self.validity.linewidth_ratio),
            truncation_deficit: round_sig(self.validity.truncation_deficit),
            edge_end: round_opt(self.validity.edge_end),
            max_abs_g: round_sig(self.max_abs_g),
            kappa: round_sig(self.kappa),
            dt: round_sig(self.dt),
            ok: self.validity.ok,
        }
    }
}

/// JSON companion of the `t,g` profile CSV.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ProfileSidecar {
    pub switch_off_time: Option<f64>,
    pub min_radicand: f64,
    pub linewidth_ratio: f64,
    pub truncation_deficit: f64,
    pub edge_end: Option<f64>,
    pub max_abs_g: f64,
    pub kappa: f64,
    pub dt: f64,
    pub ok: bool,
}

fn radicand(shape: &PulseShape, kappa: f64, t: f64) -> f64 {
    let a = shape.amplitude(t);
    shape.cumulative_energy(t) - a * a / (2.0 * kappa)
}

/// `α_in(0)² / (2κ)`.
pub fn truncation_deficit(shape: &PulseShape, kappa: f64) -> f64 {
    let a0 = shape.amplitude(0.0);
    a0 * a0 / (2.0 * kappa)
}

/// Stored amplitude below which g is not evaluated. Grows with the mode-A
/// mismatch `α_in(0)/√(2κ)` left by starting the grid at `t = 0`.
pub fn denominator_floor(shape: &PulseShape, kappa: f64) -> f64 {
    DENOMINATOR_FLOOR.max(2.0 * shape.amplitude(0.0).abs() / (2.0 * kappa).sqrt())
}

fn negative_tolerance(shape: &PulseShape, kappa: f64) -> f64 {
    RADICAND_TOL + truncation_deficit(shape, kappa)
}

fn numerator(shape: &PulseShape, kappa: f64, t: f64) -> f64 {
    (shape.amplitude_derivative(t) - kappa * shape.amplitude(t)) / (2.0 * kappa).sqrt()
}

/// `c_b(t)` under the ideal coupling.
pub fn stored_amplitude(shape: &PulseShape, config: &SystemConfig, t: f64) -> Result<f64> {
    let r = radicand(shape, config.kappa, t);
    if r < -negative_tolerance(shape, config.kappa) {
        return Err(Error::NegativeRadicand {
            time: t,
            value: r,
            range_start: t,
            range_end: t,
        });
    }
    Ok(r.max(0.0).sqrt())
}

fn coupling_from(numerator: f64, stored: f64, floor: f64, kappa: f64, t: f64) -> Result<f64> {
    if stored < floor {
        // both shrink with α_in(t) in the leading tail, so their ratio stays
        // O(κ) even when each is near the floor
        if numerator.abs() < floor * kappa || numerator.abs() <= DEGENERATE_RATIO * kappa * stored {
            return Ok(0.0);
        }
        return Err(Error::DegenerateDenominator {
            time: t,
            stored,
            numerator,
        });
    }
    Ok(numerator / stored)
}

/// The ideal coupling `g(t)`, signed. Negative over most of the storage
/// window since `dc_b/dt = −g·c_a` must be positive.
pub fn optimal_coupling(shape: &PulseShape, config: &SystemConfig, t: f64) -> Result<f64> {
    let stored = stored_amplitude(shape, config, t)?;
    coupling_from(
        numerator(shape, config.kappa, t),
        stored,
        denominator_floor(shape, config.kappa),
        config.kappa,
        t,
    )
}

/// Evaluates the ideal coupling on the configuration grid, clamps it to zero
/// once it has decayed after the pulse peak, and reports validity.
pub fn synthesize_profile(shape: &PulseShape, config: &SystemConfig) -> Result<CouplingProfile> {
    let kappa = config.kappa;
    let times = config.grid();
    let tol = negative_tolerance(shape, kappa);
    let floor = denominator_floor(shape, kappa);

    let radicands: Vec<f64> = times.iter().map(|&t| radicand(shape, kappa, t)).collect();
    let mut worst: Option<(usize, f64)> = None;
    let mut range = (f64::INFINITY, f64::NEG_INFINITY);
    for (i, &r) in radicands.iter().enumerate() {
        if r < -tol {
            range = (range.0.min(times[i]), range.1.max(times[i]));
            if worst.map_or(true, |(_, w)| r < w) {
                worst = Some((i, r));
            }
        }
    }
    if let Some((i, value)) = worst {
        return Err(Error::NegativeRadicand {
            time: times[i],
            value,
            range_start: range.0,
            range_end: range.1,
        });
    }

    let mut g_values = Vec::with_capacity(times.len());
    let mut edge_end_index = None;
    for (i, (&t, &r)) in times.iter().zip(&radicands).enumerate() {
        let stored = r.max(0.0).sqrt();
        if edge_end_index.is_none() && stored >= floor {
            edge_end_index = Some(i);
        }
        g_values.push(coupling_from(numerator(shape, kappa, t), stored, floor, kappa, t)?);
    }

    let max_abs_g = g_values.iter().fold(0.0f64, |m, g| m.max(g.abs()));
    let peak = shape.peak_time();
    let threshold = SWITCH_OFF_RATIO * max_abs_g;
    let off_index = times
        .iter()
        .zip(&g_values)
        .position(|(&t, &g)| t >= peak && g.abs() < threshold);
    let mut clamped_max = 0.0f64;
    if let Some(off) = off_index {
        for g in &mut g_values[off..] {
            clamped_max = clamped_max.max(g.abs());
            *g = 0.0;
        }
    }
    let switch_off_time = off_index.map(|i| times[i]);
    let switch_on_index = g_values.iter().position(|&g| g != 0.0);

    let min_radicand = radicands.iter().copied().fold(f64::INFINITY, f64::min);
    let min_radicand_after_edge = edge_end_index
        .map(|e| radicands[e..].iter().copied().fold(f64::INFINITY, f64::min))
        .unwrap_or(min_radicand);
    let deficit = truncation_deficit(shape, kappa);
    let validity = ValidityReport {
        min_radicand,
        min_radicand_after_edge,
        linewidth_ratio: kappa * shape.duration(),
        truncation_deficit: deficit,
        edge_end: edge_end_index.map(|i| times[i]),
        ok: edge_end_index.is_some()
            && min_radicand_after_edge >= -RADICAND_TOL
            && deficit < EDGE_DEFICIT_LIMIT,
    };

    let spline = CubicSpline::natural(times.clone(), g_values.clone());
    Ok(CouplingProfile {
        times,
        g_values,
        kappa,
        dt: config.dt,
        switch_off_time,
        switch_on_index,
        max_abs_g,
        clamped_max,
        validity,
        spline,
    })
}

/// Coupling for a coherent input `⟨c_in⟩ = √n_p · α_in`. The `√n_p` factor
/// cancels between the Heisenberg-Langevin numerator and `⟨b(t)⟩`, so this is
/// the single-photon profile.
pub fn coherent_coupling(shape: &PulseShape, config: &SystemConfig) -> Result<CouplingProfile> {
    synthesize_profile(shape, config)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    #[test]
    fn edge_ratio_decides_degeneracy() {
        // tails of comparable size near the floor: zeroed
        assert_eq!(coupling_from(-1.4e-9, 1.13e-9, 1.2e-9, 1.0, 3.0).unwrap(), 0.0);
        assert_eq!(coupling_from(5e-10, 0.0, 1e-9, 1.0, 0.0).unwrap(), 0.0);
        // finite numerator over a vanishing store: surfaced
        let err = coupling_from(1e-3, 1e-12, 1e-9, 1.0, 2.0).unwrap_err();
        assert_eq!(err.kind(), "DegenerateDenominator");
        assert!(coupling_from(1e-3, 0.0, 1e-9, 1.0, 2.0).is_err());
        // above the floor the ratio is used as is
        assert_eq!(coupling_from(-2.0, 1.0, 1e-9, 1.0, 5.0).unwrap(), -2.0);
    }

    fn fig2a() -> (PulseShape, SystemConfig) {
        // κ t_p = 20 with η = 1.
        let kappa = 20.0 / crate::pulse::gaussian_fwhm_factor();
        let shape = PulseShape::gaussian(5.0, 1.0).unwrap();
        let config = SystemConfig::for_pulse(&shape, kappa).unwrap();
        (shape, config)
    }

    #[test]
    fn config_invariants() {
        assert!(SystemConfig::new(1.0, 10.0, 1e-3, 1.0).is_ok());
        assert!(SystemConfig::new(1.0, 10.0, 1e-2, 1.0).is_ok());
        assert!(SystemConfig::new(1.0, 10.0, 2e-2, 1.0).is_err());
        assert!(SystemConfig::new(0.0, 10.0, 1e-3, 1.0).is_err());
        assert!(SystemConfig::new(1.0, 1e-4, 1e-3, 1.0).is_err());
        assert!(SystemConfig::new(1.0, 10.0, 1e-3, 0.0).is_err());
        let c = SystemConfig::new(1.0, 2.0, 1e-3, 1.0).unwrap();
        assert_eq!(c.grid_len(), 2001);
    }

    #[test]
    fn stored_amplitude_at_peak() {
        let (shape, config) = fig2a();
        assert_abs_diff_eq!(config.kappa, 8.4932, epsilon = 1e-4);
        let cb = stored_amplitude(&shape, &config, 5.0).unwrap();
        let expected =
            (0.5 * libm::erf(5.0) - 1.0 / (2.0 * std::f64::consts::PI.sqrt() * config.kappa)).sqrt();
        assert_abs_diff_eq!(cb, expected, epsilon = 1e-14);
        assert_abs_diff_eq!(cb, 0.68322, epsilon = 1e-5);
        let late = stored_amplitude(&shape, &config, 60.0).unwrap();
        assert_abs_diff_eq!(late, 1.0, epsilon = 1e-12);
    }

    #[test]
    fn stored_amplitude_rejects_narrow_linewidth() {
        let shape = PulseShape::gaussian(5.0, 1.0).unwrap();
        let config = SystemConfig::new(0.1, 13.0, 1e-3, 1.0).unwrap();
        assert!(matches!(
            stored_amplitude(&shape, &config, 1.0),
            Err(Error::NegativeRadicand { .. })
        ));
    }

    #[test]
    fn coupling_at_peak() {
        let (shape, config) = fig2a();
        let g = optimal_coupling(&shape, &config, 5.0).unwrap();
        let cb = stored_amplitude(&shape, &config, 5.0).unwrap();
        let expected = -config.kappa * std::f64::consts::PI.powf(-0.25) / ((2.0 * config.kappa).sqrt() * cb);
        assert_abs_diff_eq!(g, expected, epsilon = 1e-13);
        assert_abs_diff_eq!(g, -2.2656, epsilon = 1e-4);
    }

    #[test]
    fn coupling_vanishes_late() {
        let shape = PulseShape::sech(10.0, 1.0).unwrap();
        let config = SystemConfig::new(10.0, 30.0, 1e-4, 1.0).unwrap();
        let g = optimal_coupling(&shape, &config, 1e4).unwrap();
        assert_eq!(g, 0.0);
    }

    #[test]
    fn profile_is_valid_and_switches_off() {
        let (shape, config) = fig2a();
        let profile = synthesize_profile(&shape, &config).unwrap();
        let v = profile.validity();
        assert!(v.ok, "{v:?}");
        assert!(v.min_radicand_after_edge >= 0.0);
        assert_abs_diff_eq!(v.linewidth_ratio, 20.0, epsilon = 1e-12);
        let off = profile.switch_off_time().expect("switch-off inside the grid");
        assert!(off > shape.peak_time());
        for (&t, &g) in profile.times().iter().zip(profile.g_values()) {
            assert!(g.is_finite());
            if t >= off {
                assert_eq!(g, 0.0);
                assert_eq!(profile.value_at(t + 0.3 * config.dt), 0.0);
            }
        }
        assert!(profile.clamped_max() < SWITCH_OFF_RATIO * profile.max_abs_g());
    }

    #[test]
    fn fast_pulse_is_rejected() {
        let shape = PulseShape::gaussian_from_linewidth(1.0, 0.2, 5.0).unwrap();
        let config = SystemConfig::new(1.0, shape.support_end(), 1e-4, 1.0).unwrap();
        match synthesize_profile(&shape, &config) {
            Err(Error::NegativeRadicand {
                value,
                range_start,
                range_end,
                ..
            }) => {
                assert!(value < -RADICAND_TOL);
                assert!(range_start <= range_end);
            }
            other => panic!("expected NegativeRadicand, got {other:?}"),
        }
    }

    #[test]
    fn coherent_profile_is_photon_number_independent() {
        let (shape, config) = fig2a();
        let one = synthesize_profile(&shape, &config).unwrap();
        let many = coherent_coupling(&shape, &config.with_photons(25.0).unwrap()).unwrap();
        assert_eq!(one.g_values(), many.g_values());
        assert_eq!(one.switch_off_time(), many.switch_off_time());
    }

    #[test]
    fn profile_outside_domain_is_zero() {
        let (shape, config) = fig2a();
        let profile = synthesize_profile(&shape, &config).unwrap();
        assert_eq!(profile.value_at(-1.0), 0.0);
        assert_eq!(profile.value_at(config.t_end + 1.0), 0.0);
        assert_eq!(profile.value_at(0.0), 0.0);
        let mid = profile.value_at(5.0 + 0.5 * config.dt);
        let exact = optimal_coupling(&shape, &config, 5.0 + 0.5 * config.dt).unwrap();
        assert_abs_diff_eq!(mid, exact, epsilon = 1e-10);
    }
}
