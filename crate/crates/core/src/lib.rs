//! Monte Carlo simulator of dynamic RF combining for multi-antenna ambient
//! RF energy harvesters.
//!
//! A harvester with `M` antennas listens to a field of ambient transmitters
//! scattered as a Poisson process on a disk. Antenna signals pass through
//! `B`-bit phase shifters (each bit costs insertion loss and standby power)
//! and are combined into a single rectifier. Because the harvester is too
//! dumb to estimate channels, it *tries* phase configurations one after the
//! other, meters the DC output of each, and then keeps the best one for the
//! remainder of the coherence block. Exploration is not free: every trial
//! configuration burns measurement time and meter power, so schemes that
//! test fewer configurations can net more energy even when they find worse
//! combining weights.
//!
//! The crate models three practical exploration schemes — exhaustive search
//! over the phase grid ([`schemes::run_brute_force`]), antenna-by-antenna
//! sequential testing ([`schemes::run_sequential`]) and a DFT beam codebook
//! ([`schemes::run_codebook`]) — next to two benchmarks: a genie that knows
//! the channel ([`schemes::run_genie`]) and a rigid combiner with hardwired
//! phases ([`schemes::run_rigid`]).
//!
//! Modules follow the signal path:
//!
//! * [`geometry`] — Poisson transmitter deployments on a disk,
//! * [`channel`] — distance laws and Rician fading toward a uniform linear
//!   array,
//! * [`combiner`] — phase configurations, insertion losses and harvested DC
//!   power,
//! * [`codebook`] — phase grids, DFT codebooks and stagewise decompositions,
//! * [`schemes`] — the exploration schemes and their energy ledgers,
//! * [`montecarlo`] — reproducible parallel trial ensembles and sweeps,
//! * [`config`] — flat key=value run configuration files,
//! * [`report`] — CSV and console rendering of sweep results.

pub mod channel;
pub mod codebook;
pub mod combiner;
pub mod config;
pub mod geometry;
pub mod montecarlo;
pub mod report;
pub mod schemes;

use std::fmt;

/// Error type shared by the simulation modules.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum SimError {
    /// A parameter failed validation (non-finite, out of range, ...).
    InvalidParameter {
        /// Name of the offending parameter.
        name: &'static str,
        /// Human-readable description of the violation.
        message: String,
    },
    /// Two containers that must agree in size did not.
    DimensionMismatch {
        /// What was being matched (e.g. `"channel antennas"`).
        what: &'static str,
        expected: usize,
        found: usize,
    },
}

impl fmt::Display for SimError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            SimError::InvalidParameter { name, message } => {
                write!(f, "invalid parameter `{name}`: {message}")
            }
            SimError::DimensionMismatch {
                what,
                expected,
                found,
            } => {
                write!(f, "dimension mismatch for {what}: expected {expected}, found {found}")
            }
        }
    }
}

impl std::error::Error for SimError {}

/// Convenience alias used throughout the crate.
pub type Result<T> = std::result::Result<T, SimError>;

pub(crate) fn invalid(name: &'static str, message: impl Into<String>) -> SimError {
    SimError::InvalidParameter {
        name,
        message: message.into(),
    }
}

/// Checks that `value` is finite and strictly positive.
pub(crate) fn ensure_positive(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value <= 0.0 {
        return Err(invalid(name, format!("must be finite and > 0, got {value}")));
    }
    Ok(())
}

/// Checks that `value` is finite and non-negative.
pub(crate) fn ensure_non_negative(name: &'static str, value: f64) -> Result<()> {
    if !value.is_finite() || value < 0.0 {
        return Err(invalid(name, format!("must be finite and >= 0, got {value}")));
    }
    Ok(())
}
