//! Input pulse envelopes α_in(t) and the calculus the coupling synthesizer needs.
//!
//! Envelopes are real and square-normalized. Time starts at `t = 0`: the
//! analytic families live on the whole line and are truncated there, so the
//! peak has to sit far enough from the origin for the dropped energy to stay
//! below [`NORMALIZATION_TOL`] (see [`PulseShape::is_normalized_on_grid`]).

use std::f64::consts::{LN_2, PI};
use std::io::Read;
use std::path::Path;

use crate::error::{Error, Result};
use crate::spline::CubicSpline;

/// Allowed deviation of `∫₀^∞ α_in² dt` from one.
pub const NORMALIZATION_TOL: f64 = 1e-6;

/// Default relative bound on the first and last tabulated amplitudes.
pub const DEFAULT_EDGE_THRESHOLD: f64 = 1e-4;

/// `t_p / η` for the Gaussian envelope: full width at half maximum of α_in.
pub fn gaussian_fwhm_factor() -> f64 {
    2.0 * (2.0 * LN_2).sqrt()
}

/// `t_p / β` for the sech envelope, using the same half-maximum-of-amplitude
/// convention as the Gaussian.
pub fn sech_fwhm_factor() -> f64 {
    2.0 * 2.0f64.acosh()
}

#[derive(Debug, Clone, PartialEq)]
pub enum PulseShape {
    Gaussian { peak_time: f64, eta: f64 },
    Sech { peak_time: f64, beta: f64 },
    Tabulated(TabulatedPulse),
}

impl PulseShape {
    pub fn gaussian(peak_time: f64, eta: f64) -> Result<Self> {
        if !(peak_time.is_finite() && eta.is_finite() && peak_time > 0.0 && eta > 0.0) {
            return Err(Error::InvalidPulse(format!(
                "gaussian needs T > 0 and eta > 0, got T = {peak_time}, eta = {eta}"
            )));
        }
        Ok(PulseShape::Gaussian { peak_time, eta })
    }

    pub fn sech(peak_time: f64, beta: f64) -> Result<Self> {
        if !(peak_time.is_finite() && beta.is_finite() && peak_time > 0.0 && beta > 0.0) {
            return Err(Error::InvalidPulse(format!(
                "sech needs T > 0 and beta > 0, got T = {peak_time}, beta = {beta}"
            )));
        }
        Ok(PulseShape::Sech { peak_time, beta })
    }

    /// Gaussian with width set from the dimensionless product `κ t_p` and the
    /// peak at `peak_widths · η`.
    pub fn gaussian_from_linewidth(kappa: f64, kappa_tp: f64, peak_widths: f64) -> Result<Self> {
        let eta = kappa_tp / kappa / gaussian_fwhm_factor();
        Self::gaussian(peak_widths * eta, eta)
    }

    pub fn sech_from_linewidth(kappa: f64, kappa_tp: f64, peak_widths: f64) -> Result<Self> {
        let beta = kappa_tp / kappa / sech_fwhm_factor();
        Self::sech(peak_widths * beta, beta)
    }

    /// Energy the envelope carries before `t = 0`, which the time grid drops.
    pub fn truncated_energy(&self) -> f64 {
        1.0 - self.cumulative_energy(f64::INFINITY)
    }

    /// Whether `∫₀^∞ α_in²` is one within [`NORMALIZATION_TOL`].
    pub fn is_normalized_on_grid(&self) -> bool {
        self.truncated_energy().abs() < NORMALIZATION_TOL
    }

    pub fn amplitude(&self, t: f64) -> f64 {
        match self {
            PulseShape::Gaussian { peak_time, eta } => {
                let x = (t - peak_time) / eta;
                (eta * PI.sqrt()).powf(-0.5) * (-0.5 * x * x).exp()
            }
            PulseShape::Sech { peak_time, beta } => {
                let x = (t - peak_time) / beta;
                (2.0 * beta).powf(-0.5) / x.cosh()
            }
            PulseShape::Tabulated(tab) => tab.amplitude(t),
        }
    }

    pub fn amplitude_derivative(&self, t: f64) -> f64 {
        match self {
            PulseShape::Gaussian { peak_time, eta } => {
                -(t - peak_time) / (eta * eta) * self.amplitude(t)
            }
            PulseShape::Sech { peak_time, beta } => {
                let x = (t - peak_time) / beta;
                -x.tanh() / beta * self.amplitude(t)
            }
            PulseShape::Tabulated(tab) => tab.derivative(t),
        }
    }

    /// `∫₀ᵗ α_in²(t') dt'`; zero for `t ≤ 0`.
    pub fn cumulative_energy(&self, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        match self {
            // Before the peak the erf/tanh sums cancel down to the tail mass,
            // so use forms without the subtraction there.
            PulseShape::Gaussian { peak_time, eta } if t < *peak_time => {
                0.5 * (libm::erfc((peak_time - t) / eta) - libm::erfc(peak_time / eta))
            }
            PulseShape::Gaussian { peak_time, eta } => {
                0.5 * (libm::erf(peak_time / eta) + libm::erf((t - peak_time) / eta))
            }
            PulseShape::Sech { peak_time, beta } if t < *peak_time && peak_time / beta < 700.0 => {
                0.5 * (t / beta).sinh() / (((t - peak_time) / beta).cosh() * (peak_time / beta).cosh())
            }
            PulseShape::Sech { peak_time, beta } => {
                0.5 * ((peak_time / beta).tanh() + ((t - peak_time) / beta).tanh())
            }
            PulseShape::Tabulated(tab) => tab.cumulative_energy(t),
        }
    }

    /// Time of the envelope maximum.
    pub fn peak_time(&self) -> f64 {
        match self {
            PulseShape::Gaussian { peak_time, .. } | PulseShape::Sech { peak_time, .. } => {
                *peak_time
            }
            PulseShape::Tabulated(tab) => tab.peak_time(),
        }
    }

    /// Pulse duration `t_p`: full width at half maximum of α_in.
    pub fn duration(&self) -> f64 {
        match self {
            PulseShape::Gaussian { eta, .. } => gaussian_fwhm_factor() * eta,
            PulseShape::Sech { beta, .. } => sech_fwhm_factor() * beta,
            PulseShape::Tabulated(tab) => tab.fwhm(),
        }
    }

    /// End of the effective support: `T + 8η`, `T + 20β`, or the last sample.
    pub fn support_end(&self) -> f64 {
        match self {
            PulseShape::Gaussian { peak_time, eta } => peak_time + 8.0 * eta,
            PulseShape::Sech { peak_time, beta } => peak_time + 20.0 * beta,
            PulseShape::Tabulated(tab) => tab.end(),
        }
    }

    pub fn family(&self) -> &'static str {
        match self {
            PulseShape::Gaussian { .. } => "gaussian",
            PulseShape::Sech { .. } => "sech",
            PulseShape::Tabulated(_) => "tabulated",
        }
    }
}

/// Envelope given by samples, interpolated by a natural cubic spline and
/// rescaled to unit square norm.
#[derive(Debug, Clone, PartialEq)]
pub struct TabulatedPulse {
    spline: CubicSpline,
    energy_prefix: Vec<f64>,
    scale: f64,
}

impl TabulatedPulse {
    pub fn amplitude(&self, t: f64) -> f64 {
        self.spline.value(t).unwrap_or(0.0)
    }

    pub fn derivative(&self, t: f64) -> f64 {
        self.spline.derivative(t).unwrap_or(0.0)
    }

    pub fn cumulative_energy(&self, t: f64) -> f64 {
        let total = self.energy_prefix[self.energy_prefix.len() - 1];
        if t <= self.spline.start() {
            return 0.0;
        }
        if t >= self.spline.end() {
            return total;
        }
        let i = self.spline.segment_of(t).expect("inside knot range");
        self.energy_prefix[i] + self.spline.squared_integral_in(i, t)
    }

    /// Factor applied to the raw amplitudes to reach unit square norm.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn times(&self) -> &[f64] {
        self.spline.knots()
    }

    pub fn amplitudes(&self) -> &[f64] {
        self.spline.values()
    }

    pub fn end(&self) -> f64 {
        self.spline.end()
    }

    fn peak_index(&self) -> usize {
        let y = self.spline.values();
        let mut best = 0;
        for (i, v) in y.iter().enumerate() {
            if v.abs() > y[best].abs() {
                best = i;
            }
        }
        best
    }

    pub fn peak_time(&self) -> f64 {
        self.spline.knots()[self.peak_index()]
    }

    /// Half-maximum crossings located by linear interpolation between samples.
    pub fn fwhm(&self) -> f64 {
        let x = self.spline.knots();
        let y = self.spline.values();
        let p = self.peak_index();
        let half = 0.5 * y[p].abs();
        let cross = |i: usize, j: usize| {
            let (yi, yj) = (y[i].abs(), y[j].abs());
            x[i] + (half - yi) / (yj - yi) * (x[j] - x[i])
        };
        let left = (0..p)
            .rev()
            .find(|&i| y[i].abs() <= half)
            .map(|i| cross(i, i + 1))
            .unwrap_or(x[0]);
        let right = (p + 1..y.len())
            .find(|&i| y[i].abs() <= half)
            .map(|i| cross(i - 1, i))
            .unwrap_or(x[x.len() - 1]);
        right - left
    }
}

/// Builds a tabulated shape from `(time, amplitude)` records with the default
/// edge threshold. Returns the shape and the applied scale factor.
pub fn load_tabulated(records: &[(f64, f64)]) -> Result<(PulseShape, f64)> {
    load_tabulated_with(records, DEFAULT_EDGE_THRESHOLD)
}

pub fn load_tabulated_with(records: &[(f64, f64)], edge_threshold: f64) -> Result<(PulseShape, f64)> {
    if records.len() < 4 {
        return Err(Error::InvalidPulse(format!(
            "need at least 4 samples, got {}",
            records.len()
        )));
    }
    if let Some((t, a)) = records.iter().find(|(t, a)| !t.is_finite() || !a.is_finite()) {
        return Err(Error::InvalidPulse(format!("non-finite record ({t}, {a})")));
    }
    if let Some(w) = records.windows(2).find(|w| w[1].0 <= w[0].0) {
        return Err(Error::InvalidPulse(format!(
            "times must be strictly increasing: {} followed by {}",
            w[0].0, w[1].0
        )));
    }
    if records[0].0 < 0.0 {
        return Err(Error::InvalidPulse(format!(
            "samples must start at t >= 0, got {}",
            records[0].0
        )));
    }
    let peak = records.iter().map(|r| r.1.abs()).fold(0.0, f64::max);
    if peak == 0.0 {
        return Err(Error::InvalidPulse("all amplitudes are zero".into()));
    }

    let times: Vec<f64> = records.iter().map(|r| r.0).collect();
    let raw: Vec<f64> = records.iter().map(|r| r.1).collect();
    let raw_norm = {
        let s = CubicSpline::natural(times.clone(), raw.clone());
        s.squared_prefix()[times.len() - 1]
    };
    let scale = raw_norm.sqrt().recip();
    let scaled: Vec<f64> = raw.iter().map(|a| a * scale).collect();
    let scaled_peak = peak * scale;
    for (label, a) in [("first", scaled[0]), ("last", scaled[scaled.len() - 1])] {
        if a.abs() >= edge_threshold * scaled_peak {
            return Err(Error::InvalidPulse(format!(
                "{label} amplitude {a:.3e} exceeds edge threshold {:.1e} x peak",
                edge_threshold
            )));
        }
    }
    let spline = CubicSpline::natural(times, scaled);
    let energy_prefix = spline.squared_prefix();
    let tab = TabulatedPulse {
        spline,
        energy_prefix,
        scale,
    };
    Ok((PulseShape::Tabulated(tab), scale))
}

/// Parses the two-column `t,amplitude` CSV format; the header is optional.
pub fn read_tabulated_csv<R: Read>(reader: R) -> Result<Vec<(f64, f64)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .has_headers(false)
        .trim(csv::Trim::All)
        .comment(Some(b'#'))
        .from_reader(reader);
    let mut records = Vec::new();
    for (line, row) in rdr.records().enumerate() {
        let row = row?;
        if row.len() != 2 {
            return Err(Error::Parse(format!(
                "row {}: expected 2 columns, got {}",
                line + 1,
                row.len()
            )));
        }
        let (t, a) = (&row[0], &row[1]);
        if line == 0 && t.eq_ignore_ascii_case("t") {
            continue;
        }
        let t: f64 = t
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad time {t:?}", line + 1)))?;
        let a: f64 = a
            .parse()
            .map_err(|_| Error::Parse(format!("row {}: bad amplitude {a:?}", line + 1)))?;
        records.push((t, a));
    }
    Ok(records)
}

pub fn load_tabulated_file(path: impl AsRef<Path>) -> Result<(PulseShape, f64)> {
    let file = std::fs::File::open(path.as_ref())
        .map_err(|e| Error::Io(format!("{}: {e}", path.as_ref().display())))?;
    load_tabulated(&read_tabulated_csv(file)?)
}
