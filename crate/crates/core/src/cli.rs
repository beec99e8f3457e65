//! Command-line front end: `coupling`, `simulate` and `sweep`.
//!
//! By default the tool works in units of the cavity decay rate (κ = 1) and
//! the pulse width follows from `--kappa-tp`. `--kappa` switches to an
//! explicit rate, with widths from `--eta`/`--beta` or still from `κ t_p`.
//!
//! Exit status: 0 on success, 1 for I/O failures, 2 for bad flags or input,
//! 3 for physics diagnostics (negative radicand, unconverged plateau, ...).
//! Failures print a single JSON error record on stderr.

use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use crate::analytic::AnalyticPopulation;
use crate::coupling::{coherent_coupling, synthesize_profile, SystemConfig, DEFAULT_KAPPA_DT};
use crate::dynamics::{efficiency_at_infinity, integrate, ErrorModel};
use crate::error::{Error, Result};
use crate::output::{self, create, fmt_float};
use crate::pulse::{gaussian_fwhm_factor, load_tabulated_file, sech_fwhm_factor, PulseShape};
use crate::sweep::{linspace, run_sweep, summarize, SweepAxis, SweepSpec};

/// Environment variable naming the default output directory.
pub const OUTPUT_DIR_ENV: &str = "CAVITY_STORE_OUT";

#[derive(Debug, Parser)]
#[command(name = "cavity-store", version, about = "Coupling synthesis and storage simulation for two coupled cavities")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Synthesize the ideal coupling g(t) and write it with its validity report.
    Coupling {
        #[command(flatten)]
        common: CommonArgs,
        /// Write |g| instead of the signed coupling.
        #[arg(long)]
        magnitude: bool,
    },
    /// Integrate the storage dynamics under the ideal or a perturbed coupling.
    Simulate {
        #[command(flatten)]
        common: CommonArgs,
        #[command(flatten)]
        errors: ErrorArgs,
        /// Append the closed-form population as a `pop_b_oracle` column.
        #[arg(long)]
        oracle: bool,
        /// Write every n-th grid point to the trajectory CSV.
        #[arg(long, default_value_t = 1)]
        stride: usize,
    },
    /// Sweep the coupling amplitude factor or delay and record efficiencies.
    Sweep {
        #[command(flatten)]
        common: CommonArgs,
        #[arg(long, value_enum, default_value_t = AxisArg::Amplitude)]
        axis: AxisArg,
        /// Explicit axis values (g0, or delay as a fraction of t_p).
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
        values: Option<Vec<f64>>,
        #[arg(long, allow_hyphen_values = true)]
        from: Option<f64>,
        #[arg(long, allow_hyphen_values = true)]
        to: Option<f64>,
        #[arg(long, default_value_t = 41)]
        points: usize,
        /// Worker threads for the sweep.
        #[arg(long)]
        jobs: Option<usize>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum AxisArg {
    Amplitude,
    Delay,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct CommonArgs {
    /// `gaussian`, `sech`, or the path of a `t,amplitude` CSV file.
    #[arg(long, default_value = "gaussian")]
    pub pulse: String,
    /// Dimensionless linewidth product κ·t_p.
    #[arg(long, default_value_t = 20.0)]
    pub kappa_tp: f64,
    /// Explicit cavity decay rate; defaults to 1 (times in units of 1/κ).
    #[arg(long)]
    pub kappa: Option<f64>,
    /// Peak arrival time T; defaults to 5η (gaussian) or 10β (sech).
    #[arg(long = "peak-time", alias = "T")]
    pub peak_time: Option<f64>,
    /// Gaussian standard deviation η, overriding --kappa-tp.
    #[arg(long)]
    pub eta: Option<f64>,
    /// Sech width β, overriding --kappa-tp.
    #[arg(long)]
    pub beta: Option<f64>,
    /// Mean photon number of a coherent input.
    #[arg(long = "np", default_value_t = 1.0)]
    pub n_p: f64,
    #[arg(long)]
    pub dt: Option<f64>,
    #[arg(long)]
    pub t_end: Option<f64>,
    /// Output directory; defaults to $CAVITY_STORE_OUT or the working directory.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    pub format: Format,
}

#[derive(Debug, Clone, Args)]
pub struct ErrorArgs {
    /// Multiplicative coupling amplitude factor.
    #[arg(long, default_value_t = 1.0)]
    pub g0: f64,
    /// Coupling delay as a fraction of the pulse duration t_p.
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    pub delay_frac: f64,
}

struct Setup {
    shape: PulseShape,
    config: SystemConfig,
    out_dir: PathBuf,
    format: Format,
}

impl CommonArgs {
    fn kappa(&self) -> f64 {
        self.kappa.unwrap_or(1.0)
    }

    fn shape(&self) -> Result<PulseShape> {
        let kappa = self.kappa();
        if !(kappa.is_finite() && kappa > 0.0) {
            return Err(Error::InvalidConfig(format!("kappa must be positive, got {kappa}")));
        }
        if !(self.kappa_tp.is_finite() && self.kappa_tp > 0.0) {
            return Err(Error::InvalidConfig(format!("kappa-tp must be positive, got {}", self.kappa_tp)));
        }
        match self.pulse.as_str() {
            "gaussian" => {
                let eta = self.eta.unwrap_or(self.kappa_tp / kappa / gaussian_fwhm_factor());
                PulseShape::gaussian(self.peak_time.unwrap_or(5.0 * eta), eta)
            }
            "sech" => {
                let beta = self.beta.unwrap_or(self.kappa_tp / kappa / sech_fwhm_factor());
                PulseShape::sech(self.peak_time.unwrap_or(10.0 * beta), beta)
            }
            path => Ok(load_tabulated_file(path)?.0),
        }
    }

    fn setup(&self, extra_horizon: f64) -> Result<Setup> {
        let shape = self.shape()?;
        let kappa = self.kappa();
        let dt = self.dt.unwrap_or(DEFAULT_KAPPA_DT / kappa);
        let t_end = self.t_end.unwrap_or(shape.support_end() + extra_horizon);
        let config = SystemConfig::new(kappa, t_end, dt, self.n_p)?;
        let out_dir = self
            .output
            .clone()
            .or_else(|| std::env::var_os(OUTPUT_DIR_ENV).map(PathBuf::from))
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(Setup {
            shape,
            config,
            out_dir,
            format: self.format,
        })
    }
}

fn ensure_dir(dir: &Path) -> Result<()> {
    std::fs::create_dir_all(dir).map_err(|e| Error::Io(format!("{}: {e}", dir.display())))
}

fn run_command(cli: Cli, stdout: &mut dyn Write) -> Result<()> {
    match cli.command {
        Command::Coupling { common, magnitude } => {
            let setup = common.setup(0.0)?;
            let profile = coherent_coupling(&setup.shape, &setup.config)?;
            ensure_dir(&setup.out_dir)?;
            if setup.format == Format::Csv {
                profile.write_csv(create(&setup.out_dir.join("coupling.csv"))?, magnitude)?;
            }
            let sidecar = profile.sidecar();
            output::write_json(create(&setup.out_dir.join("coupling.json"))?, &sidecar)?;
            writeln!(
                stdout,
                "coupling: points={} max_abs_g={} switch_off_time={} min_radicand={} linewidth_ratio={} ok={}",
                profile.times().len(),
                fmt_float(profile.max_abs_g()),
                profile.switch_off_time().map_or("none".into(), fmt_float),
                fmt_float(sidecar.min_radicand),
                fmt_float(sidecar.linewidth_ratio),
                sidecar.ok
            )?;
            Ok(())
        }
        Command::Simulate {
            common,
            errors,
            oracle,
            stride,
        } => {
            let shape = common.shape()?;
            let tau = errors.delay_frac * shape.duration();
            let setup = common.setup(tau.abs())?;
            let model = ErrorModel::new(errors.g0, tau)?;
            let profile = synthesize_profile(&setup.shape, &setup.config)?;
            let traj = integrate(&setup.shape, &setup.config, &profile, &model)?;
            let n_p = setup.config.n_p;
            let summary = traj.summary(n_p);
            ensure_dir(&setup.out_dir)?;
            if setup.format == Format::Csv {
                let closed_form = AnalyticPopulation::for_pulse(&setup.shape, setup.config.kappa);
                let oracle_fn = closed_form.map(|c| move |t: f64| c.population(t));
                let oracle_ref: Option<&dyn Fn(f64) -> f64> = match (&oracle_fn, oracle) {
                    (Some(f), true) => Some(f),
                    _ => None,
                };
                if oracle && oracle_ref.is_none() {
                    return Err(Error::InvalidConfig("--oracle needs a gaussian or sech pulse".into()));
                }
                traj.write_csv(create(&setup.out_dir.join("trajectory.csv"))?, stride, oracle_ref)?;
            }
            output::write_json(create(&setup.out_dir.join("trajectory.json"))?, &summary)?;
            writeln!(
                stdout,
                "simulate: efficiency={} mean_photon_number={} max_alpha_out={} residual={} plateau_ok={}",
                fmt_float(traj.efficiency),
                fmt_float(n_p * traj.efficiency),
                fmt_float(traj.max_alpha_out),
                fmt_float(traj.conservation_residual),
                summary.plateau_ok
            )?;
            efficiency_at_infinity(&traj)?;
            Ok(())
        }
        Command::Sweep {
            common,
            axis,
            values,
            from,
            to,
            points,
            jobs,
        } => {
            let axis = match axis {
                AxisArg::Amplitude => SweepAxis::AmplitudeFactor,
                AxisArg::Delay => SweepAxis::DelayFraction,
            };
            let values = match (values, from, to) {
                (Some(v), _, _) => v,
                (None, None, None) => axis.default_values(),
                (None, from, to) => {
                    let defaults = axis.default_values();
                    linspace(
                        from.unwrap_or(defaults[0]),
                        to.unwrap_or(defaults[defaults.len() - 1]),
                        points,
                    )
                }
            };
            let setup = common.setup(0.0)?;
            let mut spec = SweepSpec::new(setup.shape, setup.config, axis, values)?;
            if let Some(jobs) = jobs {
                spec = spec.with_jobs(jobs);
            }
            let result = run_sweep(&spec)?;
            let summary = summarize(&result);
            ensure_dir(&setup.out_dir)?;
            if setup.format == Format::Csv {
                result.write_csv(create(&setup.out_dir.join("sweep.csv"))?)?;
            }
            output::write_json(create(&setup.out_dir.join("sweep.json"))?, &summary)?;
            writeln!(
                stdout,
                "sweep: points={} min_efficiency={} max_efficiency={} worst_value={} monotone={} max_residual={}",
                summary.points,
                fmt_float(summary.min_efficiency),
                fmt_float(summary.max_efficiency),
                fmt_float(summary.worst_value),
                summary.monotone,
                fmt_float(summary.max_residual)
            )?;
            Ok(())
        }
    }
}

/// Serializes an error as a single JSON record.
pub fn error_record(err: &Error) -> serde_json::Value {
    let mut record = json!({ "error": err.kind(), "message": err.to_string() });
    let inner = match err {
        Error::SweepPoint { axis_value, source } => {
            record["axis_value"] = json!(axis_value);
            source.as_ref()
        }
        other => other,
    };
    match inner {
        Error::NegativeRadicand {
            time,
            value,
            range_start,
            range_end,
        } => {
            record["time"] = json!(time);
            record["value"] = json!(value);
            record["range_start"] = json!(range_start);
            record["range_end"] = json!(range_end);
        }
        Error::DegenerateDenominator {
            time,
            stored,
            numerator,
        } => {
            record["time"] = json!(time);
            record["stored"] = json!(stored);
            record["numerator"] = json!(numerator);
        }
        Error::NonFinite { time } => record["time"] = json!(time),
        Error::Unconverged { drift } => record["drift"] = json!(drift),
        _ => {}
    }
    record
}

pub fn exit_code(err: &Error) -> i32 {
    if err.is_diagnostic() {
        3
    } else if matches!(err, Error::Io(_)) {
        1
    } else {
        2
    }
}

/// Parses `args` (including the program name), runs the command and returns
/// the process exit status.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            use clap::error::ErrorKind;
            if matches!(e.kind(), ErrorKind::DisplayHelp | ErrorKind::DisplayVersion) {
                let _ = write!(stdout, "{e}");
                return 0;
            }
            let _ = write!(stderr, "{e}");
            return 2;
        }
    };
    match run_command(cli, stdout) {
        Ok(()) => 0,
        Err(err) => {
            let _ = writeln!(stderr, "{}", error_record(&err));
            exit_code(&err)
        }
    }
}
