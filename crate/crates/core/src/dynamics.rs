//! Storage dynamics under an arbitrary, possibly perturbed, coupling.
//!
//! ```text
//! dc_a/dt = g̃(t) c_b − κ c_a + √(2κ) α_in(t)
//! dc_b/dt = −g̃(t) c_a
//! α_out   = √(2κ) c_a − α_in
//! ```
//!
//! with `g̃(t) = g₀ · g(t − τ)`. The same equations govern the mean fields of
//! a coherent input, so coherent populations are a rescaling by `n_p`.
//!
//! The integrator is classical fixed-step RK4. The output energy
//! `∫ α_out² dt` rides along as a third state component so the balance
//! `|c_a|² + |c_b|² + ∫α_out² = ∫α_in²` can be checked at integrator order.

use std::io::Write;

use serde::Serialize;

use crate::coupling::{CouplingProfile, SystemConfig};
use crate::error::{Error, Result};
use crate::output::{self, round_sig};
use crate::pulse::PulseShape;

/// Population drift tolerated over the final plateau window.
pub const PLATEAU_TOL: f64 = 1e-9;
/// Fraction of the grid, at the end, over which the plateau is checked.
pub const PLATEAU_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ErrorModel {
    /// Multiplicative amplitude factor `g₀`.
    pub g0: f64,
    /// Coupling delay `τ`; positive means the coupling lags the pulse.
    pub tau: f64,
}

impl Default for ErrorModel {
    fn default() -> Self {
        ErrorModel::IDEAL
    }
}

impl ErrorModel {
    pub const IDEAL: ErrorModel = ErrorModel { g0: 1.0, tau: 0.0 };

    pub fn new(g0: f64, tau: f64) -> Result<Self> {
        if !(g0.is_finite() && g0 > 0.0) {
            return Err(Error::InvalidConfig(format!("g0 must be positive, got {g0}")));
        }
        if !tau.is_finite() {
            return Err(Error::InvalidConfig(format!("tau must be finite, got {tau}")));
        }
        Ok(ErrorModel { g0, tau })
    }

    pub fn amplitude(g0: f64) -> Result<Self> {
        Self::new(g0, 0.0)
    }

    pub fn delay(tau: f64) -> Result<Self> {
        Self::new(1.0, tau)
    }

    pub fn is_ideal(&self) -> bool {
        *self == ErrorModel::IDEAL
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub c_a: Vec<f64>,
    pub c_b: Vec<f64>,
    pub alpha_in: Vec<f64>,
    pub alpha_out: Vec<f64>,
    pub population_b: Vec<f64>,
    /// The perturbed coupling `g₀·g(t − τ)` seen by the integrator.
    pub g_eff: Vec<f64>,
    /// Running `∫₀ᵗ α_out² dt'`.
    pub output_energy: Vec<f64>,
    pub efficiency: f64,
    pub max_alpha_out: f64,
    pub conservation_residual: f64,
    pub kappa: f64,
}

/// Neumaier-compensated accumulator so round-off does not swamp the RK4
/// truncation error over 10⁵ steps.
#[derive(Debug, Clone, Copy, Default)]
struct Compensated {
    sum: f64,
    carry: f64,
}

impl Compensated {
    fn add(&mut self, x: f64) {
        let t = self.sum + x;
        if self.sum.abs() >= x.abs() {
            self.carry += (self.sum - t) + x;
        } else {
            self.carry += (x - t) + self.sum;
        }
        self.sum = t;
    }

    fn value(&self) -> f64 {
        self.sum + self.carry
    }
}

type State = [f64; 3];

fn check_grid(config: &SystemConfig, profile: &CouplingProfile) -> Result<()> {
    if profile.dt().to_bits() != config.dt.to_bits() {
        return Err(Error::GridMismatch(format!(
            "profile dt = {} but config dt = {}",
            profile.dt(),
            config.dt
        )));
    }
    if profile.times().len() != config.grid_len() {
        return Err(Error::GridMismatch(format!(
            "profile has {} points but config grid has {}",
            profile.times().len(),
            config.grid_len()
        )));
    }
    if profile.kappa().to_bits() != config.kappa.to_bits() {
        return Err(Error::GridMismatch(format!(
            "profile synthesized for kappa = {} but config has kappa = {}",
            profile.kappa(),
            config.kappa
        )));
    }
    Ok(())
}

/// Integrates the storage equations from vacuum, `c_a(0) = c_b(0) = 0`.
pub fn integrate(
    shape: &PulseShape,
    config: &SystemConfig,
    profile: &CouplingProfile,
    errors: &ErrorModel,
) -> Result<Trajectory> {
    check_grid(config, profile)?;
    if errors.tau.abs() >= config.t_end {
        return Err(Error::InvalidConfig(format!(
            "|tau| = {} must be below t_end = {}",
            errors.tau.abs(),
            config.t_end
        )));
    }
    let ErrorModel { g0, tau } = *errors;
    let kappa = config.kappa;
    let port = (2.0 * kappa).sqrt();
    let coupling = |t: f64| g0 * profile.value_at(t - tau);
    let rhs = |g: f64, alpha: f64, y: &State| -> State {
        let out = port * y[0] - alpha;
        [g * y[1] - kappa * y[0] + port * alpha, -g * y[0], out * out]
    };

    let n = config.grid_len();
    let h = config.dt;
    let times = config.grid();
    let mut c_a = Vec::with_capacity(n);
    let mut c_b = Vec::with_capacity(n);
    let mut output_energy = Vec::with_capacity(n);
    let mut g_eff = Vec::with_capacity(n);
    let mut alpha_in = Vec::with_capacity(n);

    let mut acc = [Compensated::default(); 3];
    let mut y: State = [0.0; 3];
    let mut g_left = coupling(times[0]);
    let mut a_left = shape.amplitude(times[0]);
    c_a.push(0.0);
    c_b.push(0.0);
    output_energy.push(0.0);
    g_eff.push(g_left);
    alpha_in.push(a_left);

    for i in 0..n - 1 {
        let t = times[i];
        let t_mid = t + 0.5 * h;
        let t_next = times[i + 1];
        let g_mid = coupling(t_mid);
        let a_mid = shape.amplitude(t_mid);
        let g_right = coupling(t_next);
        let a_right = shape.amplitude(t_next);

        let k1 = rhs(g_left, a_left, &y);
        let y2 = std::array::from_fn(|j| y[j] + 0.5 * h * k1[j]);
        let k2 = rhs(g_mid, a_mid, &y2);
        let y3 = std::array::from_fn(|j| y[j] + 0.5 * h * k2[j]);
        let k3 = rhs(g_mid, a_mid, &y3);
        let y4 = std::array::from_fn(|j| y[j] + h * k3[j]);
        let k4 = rhs(g_right, a_right, &y4);
        for j in 0..3 {
            acc[j].add(h / 6.0 * (k1[j] + 2.0 * k2[j] + 2.0 * k3[j] + k4[j]));
            y[j] = acc[j].value();
        }
        if !y.iter().all(|v| v.is_finite()) {
            return Err(Error::NonFinite { time: t_next });
        }
        c_a.push(y[0]);
        c_b.push(y[1]);
        output_energy.push(y[2]);
        g_eff.push(g_right);
        alpha_in.push(a_right);
        g_left = g_right;
        a_left = a_right;
    }

    let alpha_out: Vec<f64> = c_a.iter().zip(&alpha_in).map(|(ca, a)| port * ca - a).collect();
    let population_b: Vec<f64> = c_b.iter().map(|cb| cb * cb).collect();
    let max_alpha_out = alpha_out.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    let efficiency = population_b[n - 1];
    let mut trajectory = Trajectory {
        times,
        c_a,
        c_b,
        alpha_in,
        alpha_out,
        population_b,
        g_eff,
        output_energy,
        efficiency,
        max_alpha_out,
        conservation_residual: 0.0,
        kappa,
    };
    trajectory.conservation_residual = conservation_residual(&trajectory, shape);
    Ok(trajectory)
}

/// Final mode-B population, provided it has settled over the last
/// [`PLATEAU_FRACTION`] of the grid.
pub fn efficiency_at_infinity(trajectory: &Trajectory) -> Result<f64> {
    let drift = plateau_drift(trajectory);
    if drift > PLATEAU_TOL {
        return Err(Error::Unconverged { drift });
    }
    Ok(trajectory.efficiency)
}

/// Spread of mode-B population over the final plateau window.
pub fn plateau_drift(trajectory: &Trajectory) -> f64 {
    let pop = &trajectory.population_b;
    let window = ((pop.len() as f64 * PLATEAU_FRACTION).ceil() as usize).clamp(2, pop.len());
    let tail = &pop[pop.len() - window..];
    let (lo, hi) = tail
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &p| (lo.min(p), hi.max(p)));
    hi - lo
}

/// Largest defect of `|c_a|² + |c_b|² + ∫₀ᵗ α_out² − ∫₀ᵗ α_in²` over the grid.
/// The input energy comes from the pulse itself, not from the integrator.
pub fn conservation_residual(trajectory: &Trajectory, shape: &PulseShape) -> f64 {
    trajectory
        .times
        .iter()
        .enumerate()
        .map(|(i, &t)| {
            let stored = trajectory.c_a[i].powi(2) + trajectory.c_b[i].powi(2);
            (stored + trajectory.output_energy[i] - shape.cumulative_energy(t)).abs()
        })
        .fold(0.0, f64::max)
}

/// `max |c_a(t) − α_in(t)/√(2κ)|`: how far mode A is from the null-output
/// amplitude.
pub fn ideal_mode_a_check(trajectory: &Trajectory, shape: &PulseShape, config: &SystemConfig) -> f64 {
    let port = (2.0 * config.kappa).sqrt();
    trajectory
        .times
        .iter()
        .zip(&trajectory.c_a)
        .map(|(&t, &ca)| (ca - shape.amplitude(t) / port).abs())
        .fold(0.0, f64::max)
}

/// Mean photon number in mode B for a coherent input of `n_p` photons.
pub fn coherent_expectations(trajectory: &Trajectory, n_p: f64) -> Vec<f64> {
    trajectory.population_b.iter().map(|p| n_p * p).collect()
}

pub const TRAJECTORY_HEADER: &str = "t,c_a,c_b,pop_b,alpha_in,alpha_out,g_eff";

impl Trajectory {
    pub fn len(&self) -> usize {
        self.times.len()
    }

    pub fn is_empty(&self) -> bool {
        self.times.is_empty()
    }

    /// Writes every `stride`-th grid point (and always the last). An oracle
    /// population, when given, becomes an extra `pop_b_oracle` column.
    pub fn write_csv<W: Write>(
        &self,
        out: W,
        stride: usize,
        oracle: Option<&dyn Fn(f64) -> f64>,
    ) -> Result<()> {
        let stride = stride.max(1);
        let last = self.len() - 1;
        let header = match oracle {
            Some(_) => format!("{TRAJECTORY_HEADER},pop_b_oracle"),
            None => TRAJECTORY_HEADER.to_string(),
        };
        let rows = (0..self.len())
            .filter(|i| i % stride == 0 || *i == last)
            .map(|i| {
                let mut row = vec![
                    self.times[i],
                    self.c_a[i],
                    self.c_b[i],
                    self.population_b[i],
                    self.alpha_in[i],
                    self.alpha_out[i],
                    self.g_eff[i],
                ];
                if let Some(f) = oracle {
                    row.push(f(self.times[i]));
                }
                row
            });
        output::write_csv(out, &header, rows)
    }

    pub fn summary(&self, n_p: f64) -> TrajectorySummary {
        let plateau_ok = plateau_drift(self) <= PLATEAU_TOL;
        TrajectorySummary {
            efficiency: round_sig(self.efficiency),
            max_alpha_out: round_sig(self.max_alpha_out),
            conservation_residual: round_sig(self.conservation_residual),
            plateau_ok,
            n_p: round_sig(n_p),
            mean_photon_number: round_sig(n_p * self.efficiency),
            t_end: round_sig(self.times[self.len() - 1]),
            points: self.len(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrajectorySummary {
    pub efficiency: f64,
    pub max_alpha_out: f64,
    pub conservation_residual: f64,
    pub plateau_ok: bool,
    pub n_p: f64,
    pub mean_photon_number: f64,
    pub t_end: f64,
    pub points: usize,
}
