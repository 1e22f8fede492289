use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// A parameter fell outside the region where the model is defined.
    #[error("{param}: {reason}")]
    Domain { param: &'static str, reason: String },

    /// The game is outside the supported network-effect regime (alpha < 1).
    #[error("alpha: {0}")]
    UnsupportedRegime(String),

    /// The requested quantity does not exist for these inputs (e.g. Boltzmann choice at T = 0).
    #[error("{0}")]
    UndefinedRegime(String),

    #[error("bisection did not converge in [{lo}, {hi}] after {iterations} iterations")]
    NoConvergence { lo: f64, hi: f64, iterations: usize },

    #[error("root at x = {x} has residual {residual:e} above tolerance {tolerance:e}")]
    Residual { x: f64, residual: f64, tolerance: f64 },

    #[error("integration failed at t = {t}, x = {x}: step fell below {h_min:e}")]
    StepUnderflow { t: f64, x: f64, h_min: f64 },

    #[error("at T = {temperature}: {source}")]
    AtTemperature {
        temperature: f64,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn domain(param: &'static str, reason: impl Into<String>) -> Self {
        Error::Domain {
            param,
            reason: reason.into(),
        }
    }

    pub(crate) fn at_temperature(self, temperature: f64) -> Self {
        Error::AtTemperature {
            temperature,
            source: Box::new(self),
        }
    }

    /// True for input-validation failures, false for numerical failures.
    pub fn is_validation(&self) -> bool {
        match self {
            Error::Domain { .. } | Error::UnsupportedRegime(_) | Error::UndefinedRegime(_) => true,
            Error::AtTemperature { source, .. } => source.is_validation(),
            _ => false,
        }
    }
}
