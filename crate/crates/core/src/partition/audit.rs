//! Independence audit for events `{y ∈ A⁽ʲ⁾}` over a class of vertices.
//!
//! Whether `y ∈ A⁽ʲ⁾` depends only on the initial set inside `B(y, j)`, so
//! if those balls are pairwise disjoint (equivalently all pairwise
//! distances are at least `2j + 1`) the events are independent. The audit
//! checks that exactly, then measures empirical pairwise correlations.

use rayon::prelude::*;
use thiserror::Error;

use crate::engine::{EngineError, RunOptions, Simulator, ThresholdSchedule};
use crate::graph::metric::Bfs;
use crate::graph::{Graph, GraphError, VertexId};
use crate::sampler::sample_initial;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AuditError {
    #[error("an audit needs at least two vertices, got {0}")]
    ClassTooSmall(usize),
    #[error("at least one trial is required")]
    NoTrials,
    #[error(transparent)]
    Graph(#[from] GraphError),
    #[error(transparent)]
    Engine(#[from] EngineError),
}

#[derive(Debug, Clone, PartialEq)]
pub struct AuditReport {
    pub round: u32,
    /// `2j + 1`: the distance at which the balls `B(y, j)` separate.
    pub r_dep: u32,
    pub structural_ok: bool,
    pub trials: u64,
    /// Empirical `P(y ∈ A⁽ʲ⁾)` per class member.
    pub marginals: Vec<f64>,
    pub max_abs_correlation: f64,
    /// `4 / √trials`.
    pub threshold: f64,
    pub pairs: u64,
    pub pairs_below_threshold: u64,
}

impl AuditReport {
    /// At least 99% of pairs have `|ρ̂|` below the threshold.
    pub fn statistical_ok(&self) -> bool {
        self.pairs_below_threshold as f64 >= 0.99 * self.pairs as f64
    }
}

/// Audit the events `y ∈ A⁽ʲ⁾` for `y` in `class`, with `A⁽⁰⁾ ~ P_p`.
pub fn independence_audit(
    g: &Graph,
    class: &[VertexId],
    round: u32,
    sched: &ThresholdSchedule,
    p: f64,
    trials: u64,
    seed: u64,
) -> Result<AuditReport, AuditError> {
    if class.len() < 2 {
        return Err(AuditError::ClassTooSmall(class.len()));
    }
    if trials == 0 {
        return Err(AuditError::NoTrials);
    }
    for &y in class {
        g.check_vertex(u64::from(y))?;
    }

    let mut covered = vec![false; g.order()];
    let mut bfs = Bfs::new(g.order());
    let mut structural_ok = true;
    for &y in class {
        bfs.run(g, y, round);
        for &v in bfs.visited() {
            structural_ok &= !std::mem::replace(&mut covered[v as usize], true);
        }
    }

    let opts = RunOptions {
        max_rounds: None,
        retain_rounds: true,
    };
    let outcomes: Vec<Vec<bool>> = (0..trials)
        .into_par_iter()
        .map_init(
            || Simulator::new(g),
            |sim, t| {
                let trace = sim.run(&sample_initial(g, p, seed, t), sched, opts)?;
                let rounds = trace.infection_round.expect("rounds retained");
                Ok(class.iter().map(|&y| rounds[y as usize] <= round).collect())
            },
        )
        .collect::<Result<_, EngineError>>()?;

    let c = class.len();
    let tf = trials as f64;
    let hits: Vec<f64> = (0..c)
        .map(|i| outcomes.iter().filter(|o| o[i]).count() as f64)
        .collect();
    let marginals: Vec<f64> = hits.iter().map(|h| h / tf).collect();
    let threshold = 4.0 / tf.sqrt();
    let (mut max_abs, mut pairs, mut below) = (0.0f64, 0u64, 0u64);
    for i in 0..c {
        for j in i + 1..c {
            let both = outcomes.iter().filter(|o| o[i] && o[j]).count() as f64 / tf;
            let (a, b) = (marginals[i], marginals[j]);
            let var = a * (1.0 - a) * b * (1.0 - b);
            // a constant event is uncorrelated with everything
            let rho = if var > 0.0 { (both - a * b) / var.sqrt() } else { 0.0 };
            max_abs = max_abs.max(rho.abs());
            pairs += 1;
            below += u64::from(rho.abs() < threshold);
        }
    }
    Ok(AuditReport {
        round,
        r_dep: 2 * round + 1,
        structural_ok,
        trials,
        marginals,
        max_abs_correlation: max_abs,
        threshold,
        pairs,
        pairs_below_threshold: below,
    })
}
