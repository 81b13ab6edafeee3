use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid medium preparation: {0}")]
    Preparation(String),

    #[error("invalid detuning ensemble: {0}")]
    Ensemble(String),

    #[error("invalid grid: {0}")]
    Grid(String),

    #[error("invalid pulse specification: {0}")]
    Pulse(String),

    #[error("time window too narrow: edge amplitude {edge:.3e} of peak exceeds {limit:.1e}")]
    WindowTooNarrow { edge: f64, limit: f64 },

    #[error("invalid scenario: {0}")]
    Scenario(String),

    #[error("series length mismatch: expected {expected}, found {found}")]
    LengthMismatch { expected: usize, found: usize },

    #[error("complex envelope where a real one is required (max |Im| = {max_imag:.3e})")]
    ComplexInput { max_imag: f64 },

    #[error("dressed basis undefined: total Rabi frequency {omega_t:.3e} below floor")]
    DegenerateField { omega_t: f64 },

    #[error("invalid step: {0}")]
    Step(String),

    #[error("numerical instability at z = {z:.6}: {reason}")]
    Instability { z: f64, reason: String },

    #[error("target group velocity {0} is unreachable (must lie in (0, 1))")]
    UnreachableVelocity(f64),

    #[error("fit precondition failed: {0}")]
    Fit(String),
}
