//! Storage of a propagating light pulse in the second of two coupled
//! cavities.
//!
//! Cavity A faces the input port with field decay rate κ; cavity B is closed
//! and couples to A through a time-dependent `g(t)`. This crate synthesizes
//! the coupling that absorbs a given envelope with no reflection
//! ([`coupling`]), integrates the resulting dynamics under ideal or perturbed
//! couplings ([`dynamics`]), checks them against closed forms
//! ([`analytic`]) and sweeps coupling errors ([`sweep`]).
//!
//! ```no_run
//! use cavity_store::prelude::*;
//!
//! let shape = PulseShape::gaussian_from_linewidth(1.0, 20.0, 5.0)?;
//! let config = SystemConfig::for_pulse(&shape, 1.0)?;
//! let profile = synthesize_profile(&shape, &config)?;
//! let run = integrate(&shape, &config, &profile, &ErrorModel::IDEAL)?;
//! println!("stored {:.9}", efficiency_at_infinity(&run)?);
//! # Ok::<(), cavity_store::Error>(())
//! ```

pub mod analytic;
pub mod cli;
pub mod coupling;
pub mod dynamics;
pub mod error;
pub mod output;
pub mod pulse;
mod spline;
pub mod sweep;

pub use error::{Error, Result};

pub mod prelude {
    pub use crate::analytic::{gaussian_population, sech_population, AnalyticPopulation};
    pub use crate::coupling::{
        coherent_coupling, optimal_coupling, stored_amplitude, synthesize_profile, CouplingProfile,
        SystemConfig, ValidityReport,
    };
    pub use crate::dynamics::{
        coherent_expectations, conservation_residual, efficiency_at_infinity, ideal_mode_a_check,
        integrate, ErrorModel, Trajectory,
    };
    pub use crate::error::{Error, Result};
    pub use crate::pulse::{load_tabulated, load_tabulated_file, PulseShape};
    pub use crate::sweep::{run_sweep, summarize, SweepAxis, SweepResult, SweepSpec, SweepSummary};
}
