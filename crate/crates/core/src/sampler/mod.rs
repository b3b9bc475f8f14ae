//! Monte Carlo percolation probabilities under the product measure `P_p`.
//!
//! Trials are independent and seeded individually (see [`coupling`]), so a
//! plan replays bit-identically whatever the number of worker threads: the
//! only aggregation is a success count.

pub mod coupling;
mod critical;
mod exact;
mod wilson;

use rayon::prelude::*;
use thiserror::Error;

pub use coupling::{sample_initial, vertex_uniform};
pub use critical::{
    estimate_level, estimate_pc, estimate_window, BisectionConfig, CriticalEstimate, Probe,
    Termination, Window, MAX_DOUBLINGS,
};
pub use exact::{exact_percolation_prob, PercolationPolynomial, EXACT_MAX_VERTICES};
pub use wilson::{wilson_interval, Z95};

use crate::engine::{EngineError, Simulator, ThresholdSchedule};
use crate::graph::Graph;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EstimateError {
    #[error("probability {0} outside [0, 1]")]
    Probability(f64),
    #[error("at least one trial is required")]
    NoTrials,
    #[error("tolerance must be positive, got {0}")]
    Tolerance(f64),
    #[error("alpha must lie in (0, 1/2], got {0}")]
    Alpha(f64),
    #[error("exact enumeration needs N ≤ {max}, graph has {n} vertices")]
    TooLarge { n: usize, max: usize },
    #[error(transparent)]
    Engine(#[from] EngineError),
}

/// A seeded batch of percolation trials at one density.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TrialPlan {
    pub p: f64,
    pub trials: u64,
    pub master_seed: u64,
    pub schedule: ThresholdSchedule,
}

/// Success fraction with a 95% Wilson interval.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Estimate {
    pub trials: u64,
    pub successes: u64,
    pub p_hat: f64,
    pub ci_lo: f64,
    pub ci_hi: f64,
}

impl Estimate {
    pub fn from_counts(successes: u64, trials: u64) -> Self {
        let (ci_lo, ci_hi) = wilson_interval(successes, trials, Z95);
        Self {
            trials,
            successes,
            p_hat: successes as f64 / trials as f64,
            ci_lo,
            ci_hi,
        }
    }
}

/// Number of percolating trials among `trials` (trial indices are the
/// half-open range), evaluated in parallel.
pub fn count_successes(
    g: &Graph,
    sched: &ThresholdSchedule,
    p: f64,
    master_seed: u64,
    trials: std::ops::Range<u64>,
) -> Result<u64, EstimateError> {
    if !(0.0..=1.0).contains(&p) {
        return Err(EstimateError::Probability(p));
    }
    trials
        .into_par_iter()
        .map_init(
            || Simulator::new(g),
            |sim, t| {
                let initial = sample_initial(g, p, master_seed, t);
                sim.percolates(&initial, sched).map(u64::from)
            },
        )
        .try_reduce(|| 0, |a, b| Ok(a + b))
        .map_err(EstimateError::from)
}

pub fn estimate_percolation_prob(g: &Graph, plan: &TrialPlan) -> Result<Estimate, EstimateError> {
    if plan.trials == 0 {
        return Err(EstimateError::NoTrials);
    }
    let successes = count_successes(g, &plan.schedule, plan.p, plan.master_seed, 0..plan.trials)?;
    Ok(Estimate::from_counts(successes, plan.trials))
}
