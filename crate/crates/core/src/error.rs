use thiserror::Error;

/// Failures raised by the core simulation routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("level index {n} outside 1..={n_max}")]
    LevelOutOfRange { n: usize, n_max: usize },

    #[error("position {0} outside [0, pi]")]
    PositionOutOfRange(f64),

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error(
        "truncation leakage {leakage:.3e} at level {level} exceeds {limit:.3e}; increase n_max"
    )]
    Truncation {
        level: usize,
        leakage: f64,
        limit: f64,
    },

    #[error("step {step}: probability lost {lost:.3e} exceeds {limit:.3e}; increase n_max")]
    TrajectoryLeakage { step: usize, lost: f64, limit: f64 },

    #[error(
        "step {step}: direct energy {direct} and recursed energy {recursed} disagree; increase n_max"
    )]
    EnergyMismatch {
        step: usize,
        direct: f64,
        recursed: f64,
    },

    #[error("dimension {d} exceeds the joint-state limit {limit}")]
    OracleTooLarge { d: usize, limit: usize },

    #[error("potential variant not supported by this route")]
    UnsupportedPotential,
}

pub type Result<T> = core::result::Result<T, Error>;
