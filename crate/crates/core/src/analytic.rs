//! Closed-form mode-B populations under the ideal coupling for Gaussian and
//! sech inputs. They keep the `t = 0` truncation terms (`erf(T/η)`,
//! `tanh(T/β)`) so they compare directly with the simulated grid.
//!
//! `erf` comes from `libm`, a port of the FreeBSD/musl implementation
//! (error below one ulp).

use std::f64::consts::PI;

use crate::pulse::PulseShape;

pub fn gaussian_population(peak_time: f64, eta: f64, kappa: f64, t: f64) -> f64 {
    let x = (t - peak_time) / eta;
    0.5 * (libm::erf(peak_time / eta) + libm::erf(x)) - (-x * x).exp() / (2.0 * PI.sqrt() * kappa * eta)
}

pub fn sech_population(peak_time: f64, beta: f64, kappa: f64, t: f64) -> f64 {
    let x = (t - peak_time) / beta;
    let sech = 1.0 / x.cosh();
    0.5 * ((peak_time / beta).tanh() + x.tanh()) - sech * sech / (4.0 * kappa * beta)
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum AnalyticPopulation {
    Gaussian { peak_time: f64, eta: f64, kappa: f64 },
    Sech { peak_time: f64, beta: f64, kappa: f64 },
}

impl AnalyticPopulation {
    /// `None` for tabulated pulses, which have no closed form.
    pub fn for_pulse(shape: &PulseShape, kappa: f64) -> Option<Self> {
        match *shape {
            PulseShape::Gaussian { peak_time, eta } => Some(AnalyticPopulation::Gaussian {
                peak_time,
                eta,
                kappa,
            }),
            PulseShape::Sech { peak_time, beta } => Some(AnalyticPopulation::Sech {
                peak_time,
                beta,
                kappa,
            }),
            PulseShape::Tabulated(_) => None,
        }
    }

    pub fn population(&self, t: f64) -> f64 {
        match *self {
            AnalyticPopulation::Gaussian { peak_time, eta, kappa } => {
                gaussian_population(peak_time, eta, kappa, t)
            }
            AnalyticPopulation::Sech { peak_time, beta, kappa } => {
                sech_population(peak_time, beta, kappa, t)
            }
        }
    }
}
