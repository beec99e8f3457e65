use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid pulse: {0}")]
    InvalidPulse(String),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    /// The stored-amplitude radicand went negative: the pulse rises faster
    /// than the cavity linewidth can follow.
    #[error("negative radicand {value:.6e} at t = {time:.6e} (offending range [{range_start:.6e}, {range_end:.6e}])")]
    NegativeRadicand {
        time: f64,
        value: f64,
        range_start: f64,
        range_end: f64,
    },

    #[error("degenerate denominator at t = {time:.6e}: c_b = {stored:.3e}, numerator = {numerator:.3e}")]
    DegenerateDenominator {
        time: f64,
        stored: f64,
        numerator: f64,
    },

    #[error("profile grid does not match configuration: {0}")]
    GridMismatch(String),

    #[error("non-finite state at t = {time:.6e}")]
    NonFinite { time: f64 },

    /// Mode B population still changes over the final stretch of the grid.
    #[error("population not converged: drift {drift:.3e} over the final plateau window")]
    Unconverged { drift: f64 },

    #[error("sweep point {axis_value}: {source}")]
    SweepPoint {
        axis_value: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("i/o error: {0}")]
    Io(String),

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    /// Short machine-readable tag used in serialized error records.
    pub fn kind(&self) -> &'static str {
        match self {
            Error::InvalidPulse(_) => "InvalidPulse",
            Error::InvalidConfig(_) => "InvalidConfig",
            Error::NegativeRadicand { .. } => "NegativeRadicand",
            Error::DegenerateDenominator { .. } => "DegenerateDenominator",
            Error::GridMismatch(_) => "GridMismatch",
            Error::NonFinite { .. } => "NonFinite",
            Error::Unconverged { .. } => "Unconverged",
            Error::SweepPoint { source, .. } => source.kind(),
            Error::Io(_) => "Io",
            Error::Parse(_) => "Parse",
        }
    }

    /// Whether the failure is a physics diagnostic (as opposed to bad input or I/O).
    pub fn is_diagnostic(&self) -> bool {
        match self {
            Error::NegativeRadicand { .. }
            | Error::DegenerateDenominator { .. }
            | Error::NonFinite { .. }
            | Error::Unconverged { .. } => true,
            Error::SweepPoint { source, .. } => source.is_diagnostic(),
            _ => false,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Parse(e.to_string())
    }
}
