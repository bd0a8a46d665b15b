use thiserror::Error;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("integration failed at t = {t} us: step size underflow (h = {h:e})")]
    StepUnderflow { t: f64, h: f64 },

    #[error("integration failed at t = {t} us: exceeded {max_steps} steps")]
    TooManySteps { t: f64, max_steps: usize },

    #[error("integration failed at t = {t} us: non-finite state")]
    NonFinite { t: f64 },

    #[error("invalid integrator configuration: {0}")]
    InvalidConfig(&'static str),

    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    #[error("state vector has dimension {got}, expected {expected}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("unknown preset id `{0}`")]
    UnknownPreset(alloc::string::String),

    #[error("gauge inconsistency: computational amplitudes differ by {deviation:e}")]
    GaugeInconsistency { deviation: f64 },

    #[error("adiabatic elimination is singular for zero intermediate detuning")]
    SingularElimination,

    #[error("invalid search settings: {0}")]
    InvalidSearch(&'static str),

    #[error("invalid scan settings: {0}")]
    InvalidScan(&'static str),
}

impl Error {
    /// Numerical failure, as opposed to a malformed request.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::StepUnderflow { .. }
                | Error::TooManySteps { .. }
                | Error::NonFinite { .. }
                | Error::GaugeInconsistency { .. }
        )
    }
}
