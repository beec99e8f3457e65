//! One-dimensional robustness sweeps over the coupling amplitude factor or
//! the coupling delay.
//!
//! The ideal profile is synthesized once for the base configuration and
//! shared read-only by every grid point; each point perturbs that fixed
//! profile. Points run on a bounded rayon pool and are assembled in axis
//! order, so results do not depend on scheduling.

use std::io::Write;

use rayon::prelude::*;
use serde::Serialize;

use crate::coupling::{synthesize_profile, CouplingProfile, SystemConfig};
use crate::dynamics::{integrate, plateau_drift, ErrorModel, PLATEAU_TOL};
use crate::error::{Error, Result};
use crate::output::{self, round_opt, round_sig};
use crate::pulse::PulseShape;

/// Efficiency that counts as robust storage.
pub const ROBUST_EFFICIENCY: f64 = 0.9999;
/// Slack allowed when checking monotone decay; absorbs round-off between
/// points that all sit within 10⁻¹⁰ of full storage.
pub const MONOTONE_SLACK: f64 = 1e-10;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum SweepAxis {
    /// Values are `g₀`.
    AmplitudeFactor,
    /// Values are `τ / t_p`.
    DelayFraction,
}

impl SweepAxis {
    /// Axis value of the unperturbed coupling.
    pub fn ideal_value(self) -> f64 {
        match self {
            SweepAxis::AmplitudeFactor => 1.0,
            SweepAxis::DelayFraction => 0.0,
        }
    }

    pub fn default_values(self) -> Vec<f64> {
        let (lo, hi) = match self {
            SweepAxis::AmplitudeFactor => (0.8, 1.2),
            SweepAxis::DelayFraction => (-0.2, 0.2),
        };
        linspace(lo, hi, 41)
    }
}

/// `n` evenly spaced values from `lo` to `hi` inclusive.
pub fn linspace(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![lo],
        _ => (0..n)
            .map(|i| {
                if i == n - 1 {
                    hi
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            })
            .collect(),
    }
}

#[derive(Debug, Clone)]
pub struct SweepSpec {
    pub shape: PulseShape,
    /// Undelayed base configuration; delay sweeps extend its horizon by the
    /// largest `|τ|`.
    pub config: SystemConfig,
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub n_p: f64,
    /// Worker bound; `None` uses rayon's default.
    pub jobs: Option<usize>,
}

impl SweepSpec {
    pub fn new(shape: PulseShape, config: SystemConfig, axis: SweepAxis, values: Vec<f64>) -> Result<Self> {
        let spec = SweepSpec {
            shape,
            config,
            axis,
            values,
            n_p: config.n_p,
            jobs: None,
        };
        spec.validate()?;
        Ok(spec)
    }

    pub fn with_jobs(mut self, jobs: usize) -> Self {
        self.jobs = Some(jobs.max(1));
        self
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::InvalidConfig(m));
        if self.values.is_empty() {
            return bad("sweep needs at least one axis value".into());
        }
        if let Some(v) = self.values.iter().find(|v| !v.is_finite()) {
            return bad(format!("non-finite axis value {v}"));
        }
        match self.axis {
            SweepAxis::AmplitudeFactor => {
                if let Some(v) = self.values.iter().find(|&&v| v <= 0.0) {
                    return bad(format!("amplitude factors must be positive, got {v}"));
                }
            }
            SweepAxis::DelayFraction => {
                if let Some(v) = self.values.iter().find(|v| v.abs() > 0.5) {
                    return bad(format!("delay fractions must lie in [-0.5, 0.5], got {v}"));
                }
            }
        }
        Ok(())
    }

    fn error_model(&self, value: f64) -> Result<ErrorModel> {
        match self.axis {
            SweepAxis::AmplitudeFactor => ErrorModel::amplitude(value),
            SweepAxis::DelayFraction => ErrorModel::delay(value * self.shape.duration()),
        }
    }

    /// Base configuration with the horizon extended by the largest delay.
    pub fn run_config(&self) -> Result<SystemConfig> {
        let max_delay = match self.axis {
            SweepAxis::AmplitudeFactor => 0.0,
            SweepAxis::DelayFraction => {
                self.values.iter().fold(0.0f64, |m, v| m.max(v.abs())) * self.shape.duration()
            }
        };
        self.config.with_t_end(self.config.t_end + max_delay)
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepResult {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
    pub efficiencies: Vec<f64>,
    pub conservation_residuals: Vec<f64>,
    pub plateau_flags: Vec<bool>,
    pub n_p: f64,
}

pub fn run_sweep(spec: &SweepSpec) -> Result<SweepResult> {
    spec.validate()?;
    let config = spec.run_config()?;
    let profile = synthesize_profile(&spec.shape, &config)?;
    let point = |&value: &f64| -> Result<(f64, f64, bool)> {
        evaluate_point(spec, &config, &profile, value).map_err(|e| Error::SweepPoint {
            axis_value: value,
            source: Box::new(e),
        })
    };
    let results: Vec<Result<(f64, f64, bool)>> = match spec.jobs {
        Some(jobs) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(jobs)
                .build()
                .map_err(|e| Error::InvalidConfig(e.to_string()))?;
            pool.install(|| spec.values.par_iter().map(point).collect())
        }
        None => spec.values.par_iter().map(point).collect(),
    };
    let mut efficiencies = Vec::with_capacity(results.len());
    let mut residuals = Vec::with_capacity(results.len());
    let mut plateau_flags = Vec::with_capacity(results.len());
    for r in results {
        let (eff, res, flag) = r?;
        efficiencies.push(eff);
        residuals.push(res);
        plateau_flags.push(flag);
    }
    Ok(SweepResult {
        axis: spec.axis,
        values: spec.values.clone(),
        efficiencies,
        conservation_residuals: residuals,
        plateau_flags,
        n_p: spec.n_p,
    })
}

fn evaluate_point(
    spec: &SweepSpec,
    config: &SystemConfig,
    profile: &CouplingProfile,
    value: f64,
) -> Result<(f64, f64, bool)> {
    let errors = spec.error_model(value)?;
    let traj = integrate(&spec.shape, config, profile, &errors)?;
    let plateau_ok = plateau_drift(&traj) <= PLATEAU_TOL;
    Ok((traj.efficiency, traj.conservation_residual, plateau_ok))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepSummary {
    pub axis: SweepAxis,
    pub points: usize,
    pub min_efficiency: f64,
    pub max_efficiency: f64,
    /// Axis value with the lowest efficiency.
    pub worst_value: f64,
    /// Largest axis value at or below the ideal value such that every point
    /// between it and the ideal value stores at least [`ROBUST_EFFICIENCY`].
    pub robust_low: Option<f64>,
    /// Same, above the ideal value.
    pub robust_high: Option<f64>,
    /// `min(ideal − robust_low, robust_high − ideal)` over the sides present.
    pub robustness_radius: Option<f64>,
    pub monotone: bool,
    pub max_residual: f64,
    pub all_plateaus_ok: bool,
    pub mean_photon_number_min: f64,
}

pub fn summarize(result: &SweepResult) -> SweepSummary {
    let n = result.values.len();
    let (mut imin, mut imax) = (0, 0);
    for i in 0..n {
        if result.efficiencies[i] < result.efficiencies[imin] {
            imin = i;
        }
        if result.efficiencies[i] > result.efficiencies[imax] {
            imax = i;
        }
    }
    let ideal = result.axis.ideal_value();
    let side = |above: bool| -> (Vec<(f64, f64)>, bool) {
        let mut pts: Vec<(f64, f64)> = result
            .values
            .iter()
            .zip(&result.efficiencies)
            .filter(|(v, _)| if above { **v >= ideal } else { **v <= ideal })
            .map(|(v, e)| ((v - ideal).abs(), *e))
            .collect();
        pts.sort_by(|a, b| a.0.total_cmp(&b.0));
        let monotone = pts.windows(2).all(|w| w[1].1 <= w[0].1 + MONOTONE_SLACK);
        (pts, monotone)
    };
    let robust_edge = |pts: &[(f64, f64)]| -> Option<f64> {
        let mut edge = None;
        for &(d, e) in pts {
            if e < ROBUST_EFFICIENCY {
                break;
            }
            edge = Some(d);
        }
        edge
    };
    let (low, low_mono) = side(false);
    let (high, high_mono) = side(true);
    let robust_low = robust_edge(&low).map(|d| ideal - d);
    let robust_high = robust_edge(&high).map(|d| ideal + d);
    let radius = match (robust_low, robust_high) {
        (Some(l), Some(h)) => Some((ideal - l).min(h - ideal)),
        (Some(l), None) if high.is_empty() => Some(ideal - l),
        (None, Some(h)) if low.is_empty() => Some(h - ideal),
        _ => None,
    };
    SweepSummary {
        axis: result.axis,
        points: n,
        min_efficiency: round_sig(result.efficiencies[imin]),
        max_efficiency: round_sig(result.efficiencies[imax]),
        worst_value: round_sig(result.values[imin]),
        robust_low: round_opt(robust_low),
        robust_high: round_opt(robust_high),
        robustness_radius: round_opt(radius),
        monotone: low_mono && high_mono,
        max_residual: round_sig(result.conservation_residuals.iter().copied().fold(0.0, f64::max)),
        all_plateaus_ok: result.plateau_flags.iter().all(|&f| f),
        mean_photon_number_min: round_sig(result.n_p * result.efficiencies[imin]),
    }
}

pub const SWEEP_HEADER: &str = "axis_value,efficiency,residual,plateau_ok";

impl SweepResult {
    pub fn write_csv<W: Write>(&self, mut out: W) -> Result<()> {
        writeln!(out, "{SWEEP_HEADER}")?;
        for i in 0..self.values.len() {
            writeln!(
                out,
                "{},{},{},{}",
                output::fmt_float(self.values[i]),
                output::fmt_float(self.efficiencies[i]),
                output::fmt_float(self.conservation_residuals[i]),
                self.plateau_flags[i]
            )?;
        }
        out.flush()?;
        Ok(())
    }
}
