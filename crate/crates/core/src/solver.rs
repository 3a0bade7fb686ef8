//! Options and traces shared by the two solvers.

use alloc::vec::Vec;
use core::time::Duration;

use serde::{Deserialize, Serialize};

use crate::model::{Beamformer, PhaseVector};
use crate::{Error, Result};

/// Default stopping threshold on the relative objective increment.
pub const DEFAULT_EPSILON: f64 = 1e-6;
/// Default cap on outer iterations.
pub const DEFAULT_MAX_ITERATIONS: usize = 10_000;

/// How much of the objective trajectory to record.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TraceGranularity {
    /// One entry per outer iteration.
    #[default]
    Outer,
    /// Additionally one entry per block update.
    Block,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SolverOptions {
    /// Stop once `(g_{t+1} − g_t) / g_t < epsilon`.
    pub epsilon: f64,
    pub max_iterations: usize,
    pub trace_granularity: TraceGranularity,
}

impl Default for SolverOptions {
    fn default() -> Self {
        Self {
            epsilon: DEFAULT_EPSILON,
            max_iterations: DEFAULT_MAX_ITERATIONS,
            trace_granularity: TraceGranularity::Outer,
        }
    }
}

impl SolverOptions {
    pub fn validate(&self) -> Result<()> {
        if !(self.epsilon > 0.0) || !self.epsilon.is_finite() {
            return Err(Error::invalid("epsilon must be positive and finite"));
        }
        if self.max_iterations == 0 {
            return Err(Error::invalid("max_iterations must be at least 1"));
        }
        Ok(())
    }
}

/// Objective trajectory and convergence metadata of one solve.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct SolveTrace {
    /// Objective ratio at the starting point, then after every outer iteration.
    pub objective_history: Vec<f64>,
    /// Objective ratio at the starting point, then after every block update.
    /// Empty unless [`TraceGranularity::Block`] was requested.
    pub block_history: Vec<f64>,
    pub secrecy_rate_final: f64,
    /// Outer iterations performed.
    pub iterations: usize,
    /// Beamformer plus phase block updates performed.
    pub block_updates: usize,
    pub converged: bool,
    /// Zero unless the crate is built with the `std` feature.
    pub wall_time: Duration,
}

impl SolveTrace {
    pub fn final_ratio(&self) -> f64 {
        self.objective_history.last().copied().unwrap_or(f64::NAN)
    }
}

/// Solver output.
#[derive(Debug, Clone, PartialEq)]
pub struct Solution {
    pub beamformer: Beamformer,
    pub phases: PhaseVector,
    pub trace: SolveTrace,
}

/// Relative increment used as the stopping metric.
pub(crate) fn relative_increment(prev: f64, next: f64) -> f64 {
    (next - prev) / prev.abs()
}

/// `next` did not fall below `prev` beyond `rel_tol` relative slack.
pub(crate) fn non_decreasing(prev: f64, next: f64, rel_tol: f64) -> bool {
    next >= prev - rel_tol * prev.abs()
}

#[cfg(feature = "std")]
pub(crate) struct Stopwatch(std::time::Instant);

#[cfg(feature = "std")]
impl Stopwatch {
    pub(crate) fn start() -> Self {
        Self(std::time::Instant::now())
    }

    pub(crate) fn elapsed(&self) -> Duration {
        self.0.elapsed()
    }
}

#[cfg(not(feature = "std"))]
pub(crate) struct Stopwatch;

#[cfg(not(feature = "std"))]
impl Stopwatch {
    pub(crate) fn start() -> Self {
        Self
    }

    pub(crate) fn elapsed(&self) -> Duration {
        Duration::ZERO
    }
}
