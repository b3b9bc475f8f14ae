//! Bisection for the density at which the percolation probability crosses a
//! target level (1/2 for `p_c`).
//!
//! All probes share one master seed and draw trials `0, 1, 2, …`, so every
//! probe sees the same coupled initial sets, and doubling a probe only adds
//! fresh trial indices to the ones already counted.

use super::{count_successes, Estimate, EstimateError};
use crate::engine::ThresholdSchedule;
use crate::graph::Graph;

/// Default cap on trial doublings per probe (`2^6 ×` the base count).
pub const MAX_DOUBLINGS: u32 = 6;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BisectionConfig {
    pub base_trials: u64,
    pub tol: f64,
    pub master_seed: u64,
    pub max_doublings: u32,
}

impl BisectionConfig {
    pub fn new(base_trials: u64, tol: f64, master_seed: u64) -> Self {
        Self {
            base_trials,
            tol,
            master_seed,
            max_doublings: MAX_DOUBLINGS,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Probe {
    pub p: f64,
    pub estimate: Estimate,
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Termination {
    /// Bracket narrowed to within `tol`.
    Converged,
    /// The probe at `p` could not be separated from the target level even
    /// at the trial cap; the bracket is wider than `tol`.
    Undecided { p: f64 },
    /// The schedule percolates from the empty set (threshold 0).
    Degenerate,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CriticalEstimate {
    pub level: f64,
    pub pc_hat: f64,
    pub p_lo: f64,
    pub p_hi: f64,
    pub probes: Vec<Probe>,
    pub termination: Termination,
}

impl CriticalEstimate {
    pub fn width(&self) -> f64 {
        self.p_hi - self.p_lo
    }

    pub fn converged(&self) -> bool {
        self.termination == Termination::Converged
    }
}

/// Quantiles `p_α` and `p_{1-α}` of the percolation probability.
#[derive(Debug, Clone, PartialEq)]
pub struct Window {
    pub alpha: f64,
    pub lower: CriticalEstimate,
    pub upper: CriticalEstimate,
}

impl Window {
    pub fn width(&self) -> f64 {
        self.upper.pc_hat - self.lower.pc_hat
    }
}

/// Bisect on `p` for the crossing of `level ∈ (0, 1)`.
pub fn estimate_level(
    g: &Graph,
    sched: &ThresholdSchedule,
    level: f64,
    cfg: &BisectionConfig,
) -> Result<CriticalEstimate, EstimateError> {
    if cfg.base_trials == 0 {
        return Err(EstimateError::NoTrials);
    }
    if cfg.tol.is_nan() || cfg.tol <= 0.0 {
        return Err(EstimateError::Tolerance(cfg.tol));
    }
    if sched.threshold_at(0) == 0 {
        return Ok(CriticalEstimate {
            level,
            pc_hat: 0.0,
            p_lo: 0.0,
            p_hi: 0.0,
            probes: Vec::new(),
            termination: Termination::Degenerate,
        });
    }

    let (mut lo, mut hi) = (0.0f64, 1.0f64);
    let mut probes = Vec::new();
    let cap = cfg.base_trials << cfg.max_doublings;
    while hi - lo > cfg.tol {
        let mid = 0.5 * (lo + hi);
        let mut trials = cfg.base_trials;
        let mut successes = count_successes(g, sched, mid, cfg.master_seed, 0..trials)?;
        loop {
            let est = Estimate::from_counts(successes, trials);
            probes.push(Probe {
                p: mid,
                estimate: est,
                seed: cfg.master_seed,
            });
            if est.ci_hi < level {
                lo = mid;
                break;
            }
            if est.ci_lo > level {
                hi = mid;
                break;
            }
            if trials >= cap {
                return Ok(CriticalEstimate {
                    level,
                    pc_hat: mid,
                    p_lo: lo,
                    p_hi: hi,
                    probes,
                    termination: Termination::Undecided { p: mid },
                });
            }
            successes += count_successes(g, sched, mid, cfg.master_seed, trials..2 * trials)?;
            trials *= 2;
        }
    }
    Ok(CriticalEstimate {
        level,
        pc_hat: 0.5 * (lo + hi),
        p_lo: lo,
        p_hi: hi,
        probes,
        termination: Termination::Converged,
    })
}

/// Estimate `p_c`, the density where the percolation probability is 1/2.
pub fn estimate_pc(
    g: &Graph,
    sched: &ThresholdSchedule,
    cfg: &BisectionConfig,
) -> Result<CriticalEstimate, EstimateError> {
    estimate_level(g, sched, 0.5, cfg)
}

pub fn estimate_window(
    g: &Graph,
    sched: &ThresholdSchedule,
    alpha: f64,
    cfg: &BisectionConfig,
) -> Result<Window, EstimateError> {
    if !(alpha > 0.0 && alpha <= 0.5) {
        return Err(EstimateError::Alpha(alpha));
    }
    Ok(Window {
        alpha,
        lower: estimate_level(g, sched, alpha, cfg)?,
        upper: estimate_level(g, sched, 1.0 - alpha, cfg)?,
    })
}
