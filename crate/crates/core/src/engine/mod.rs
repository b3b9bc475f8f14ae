//! Synchronous bootstrap dynamics.
//!
//! Round `m → m+1` adds every healthy vertex `v` with
//! `|Γ(v) ∩ A⁽ᵐ⁾| ≥ threshold_at(m)`; all decisions in a round read the
//! round-`m` set only. Hypercubes run on a bit-sliced word kernel, every
//! other family on an incremental neighbour-count kernel. A deliberately
//! naive implementation lives in [`reference`] for equivalence testing.

mod bitslice;
mod frontier;
pub mod reference;
mod schedule;

use std::io::{self, Write};

use thiserror::Error;

pub use schedule::{majority_threshold, ScheduleParseError, ThresholdSchedule};

use crate::bitset::VertexSet;
use crate::graph::{Graph, VertexId};

/// Round index of vertices that never become infected.
pub const NEVER: u32 = u32::MAX;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("no fixpoint within {cap} rounds")]
    RoundCap { cap: usize },
    #[error("schedules not comparable: round {round} has threshold {generous} > {strict}")]
    NotComparable {
        round: usize,
        strict: u32,
        generous: u32,
    },
    #[error("vertex set over {got} vertices used with a graph on {expected}")]
    SizeMismatch { expected: usize, got: usize },
}

/// `A⁽ᵐ⁾` together with its round index `m`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InfectionState {
    pub infected: VertexSet,
    pub round: usize,
}

impl InfectionState {
    pub fn initial(infected: VertexSet) -> Self {
        Self { infected, round: 0 }
    }
}

/// Summary of a run to the fixpoint.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Trace {
    /// `|A⁽ᵐ⁾|` for `m = 0..=rounds_to_fixpoint`; strictly increasing.
    pub counts: Vec<usize>,
    /// Last round in which the infected set grew (0 if it never did).
    pub rounds_to_fixpoint: usize,
    pub percolated: bool,
    pub final_set: VertexSet,
    /// Round at which each vertex joined ([`NEVER`] if it did not), when
    /// requested via [`RunOptions::retain_rounds`].
    pub infection_round: Option<Vec<u32>>,
}

impl Trace {
    /// `|A⁽ᵐ⁾ \ A⁽ᵐ⁻¹⁾|` per round; round 0 reports `|A⁽⁰⁾|`.
    pub fn new_counts(&self) -> Vec<usize> {
        let mut prev = 0;
        self.counts
            .iter()
            .map(|&c| {
                let d = c - prev;
                prev = c;
                d
            })
            .collect()
    }

    /// `A⁽ᵐ⁾`, available when rounds were retained.
    pub fn set_at_round(&self, m: usize) -> Option<VertexSet> {
        let rounds = self.infection_round.as_ref()?;
        let n = self.final_set.universe();
        Some(VertexSet::from_indices(
            n,
            (0..n as VertexId).filter(|&v| (rounds[v as usize] as u64) <= m as u64),
        ))
    }

    /// CSV with header `round,infected_count,new_count`.
    pub fn write_csv<W: Write>(&self, mut w: W) -> io::Result<()> {
        writeln!(w, "round,infected_count,new_count")?;
        for (m, (count, new)) in self.counts.iter().zip(self.new_counts()).enumerate() {
            writeln!(w, "{m},{count},{new}")?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, Default)]
pub struct RunOptions {
    /// Maximum number of rounds to execute; defaults to `N + k + 1`, which
    /// always suffices.
    pub max_rounds: Option<usize>,
    pub retain_rounds: bool,
}

/// Reusable per-worker scratch space for repeated runs on one graph.
pub struct Simulator<'g> {
    graph: &'g Graph,
    kernel: Kernel,
}

enum Kernel {
    Bitslice(bitslice::Scratch),
    Frontier(frontier::Scratch),
}

impl<'g> Simulator<'g> {
    pub fn new(graph: &'g Graph) -> Self {
        let kernel = match graph.hypercube_dim() {
            Some(dim) => Kernel::Bitslice(bitslice::Scratch::new(dim)),
            None => Kernel::Frontier(frontier::Scratch::new(graph.order())),
        };
        Self { graph, kernel }
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn run(
        &mut self,
        initial: &VertexSet,
        sched: &ThresholdSchedule,
        opts: RunOptions,
    ) -> Result<Trace, EngineError> {
        let n = self.graph.order();
        if initial.universe() != n {
            return Err(EngineError::SizeMismatch {
                expected: n,
                got: initial.universe(),
            });
        }
        let cap = opts
            .max_rounds
            .unwrap_or(n + sched.relaxed_rounds() + 1);
        let mut rounds = opts
            .retain_rounds
            .then(|| initial_rounds(initial));
        let (counts, final_set) = match &mut self.kernel {
            Kernel::Bitslice(s) => s.run(initial, sched, cap, rounds.as_deref_mut())?,
            Kernel::Frontier(s) => s.run(self.graph, initial, sched, cap, rounds.as_deref_mut())?,
        };
        Ok(finish(counts, final_set, rounds))
    }

    /// Whether `initial` percolates; skips trace bookkeeping.
    pub fn percolates(
        &mut self,
        initial: &VertexSet,
        sched: &ThresholdSchedule,
    ) -> Result<bool, EngineError> {
        Ok(self.run(initial, sched, RunOptions::default())?.percolated)
    }
}

fn initial_rounds(initial: &VertexSet) -> Vec<u32> {
    let mut r = vec![NEVER; initial.universe()];
    for v in initial.iter() {
        r[v as usize] = 0;
    }
    r
}

/// Trim trailing stationary rounds (a relaxed schedule keeps stepping until
/// round `k` even when nothing changes).
fn finish(mut counts: Vec<usize>, final_set: VertexSet, rounds: Option<Vec<u32>>) -> Trace {
    while counts.len() > 1 && counts[counts.len() - 1] == counts[counts.len() - 2] {
        counts.pop();
    }
    Trace {
        rounds_to_fixpoint: counts.len() - 1,
        percolated: final_set.is_full(),
        counts,
        final_set,
        infection_round: rounds,
    }
}

/// One synchronous round. The input state is not modified.
pub fn step(g: &Graph, s: &InfectionState, sched: &ThresholdSchedule) -> InfectionState {
    let threshold = sched.threshold_at(s.round);
    let mut next = s.infected.clone();
    match g.hypercube_dim() {
        Some(dim) => {
            let mut new = vec![0u64; s.infected.words().len()];
            bitslice::new_infections(dim, s.infected.words(), &mut new, threshold);
            for (w, n) in next.words_mut().iter_mut().zip(new) {
                *w |= n;
            }
        }
        None => {
            for v in 0..g.order() as VertexId {
                if s.infected.contains(v) {
                    continue;
                }
                let mut hits = 0u32;
                g.for_each_neighbor(v, |u| hits += s.infected.contains(u) as u32);
                if hits >= threshold {
                    next.insert(v);
                }
            }
        }
    }
    InfectionState {
        infected: next,
        round: s.round + 1,
    }
}

/// Run from `initial` until no vertex joins in a round `m ≥ k`.
pub fn run_to_fixpoint(
    g: &Graph,
    initial: &VertexSet,
    sched: &ThresholdSchedule,
    max_rounds: Option<usize>,
) -> Result<Trace, EngineError> {
    Simulator::new(g).run(
        initial,
        sched,
        RunOptions {
            max_rounds,
            retain_rounds: false,
        },
    )
}

/// Check that schedule `generous` dominates `strict` from `initial`:
/// `A⁽ᵐ⁾` under `strict` is contained in `A⁽ᵐ⁾` under `generous` for every
/// round `m`. Requires `generous` to be pointwise no stricter.
pub fn dominance_check(
    g: &Graph,
    initial: &VertexSet,
    strict: &ThresholdSchedule,
    generous: &ThresholdSchedule,
) -> Result<bool, EngineError> {
    let horizon = strict.relaxed_rounds().max(generous.relaxed_rounds());
    for round in 0..=horizon {
        let (a, b) = (strict.threshold_at(round), generous.threshold_at(round));
        if b > a {
            return Err(EngineError::NotComparable {
                round,
                strict: a,
                generous: b,
            });
        }
    }
    let opts = RunOptions {
        max_rounds: None,
        retain_rounds: true,
    };
    let mut sim = Simulator::new(g);
    let a = sim.run(initial, strict, opts)?;
    let b = sim.run(initial, generous, opts)?;
    let (ra, rb) = (a.infection_round.unwrap(), b.infection_round.unwrap());
    Ok(ra.iter().zip(&rb).all(|(a, b)| b <= a))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q2() -> Graph {
        Graph::hypercube(2).unwrap()
    }

    fn set(n: usize, v: &[VertexId]) -> VertexSet {
        VertexSet::from_indices(n, v.iter().copied())
    }

    #[test]
    fn step_q2_r1() {
        let g = q2();
        let s = InfectionState::initial(set(4, &[0]));
        let next = step(&g, &s, &ThresholdSchedule::constant(1));
        assert_eq!(next.infected.to_vec(), vec![0, 1, 2]);
        assert_eq!(next.round, 1);
        // input untouched
        assert_eq!(s.infected.to_vec(), vec![0]);
    }

    #[test]
    fn step_empty_and_full_are_fixed() {
        for g in [q2(), Graph::torus(3, 2).unwrap()] {
            let n = g.order();
            for r in 1..4 {
                let sched = ThresholdSchedule::constant(r);
                let e = step(&g, &InfectionState::initial(VertexSet::empty(n)), &sched);
                assert!(e.infected.is_empty());
                let f = step(&g, &InfectionState::initial(VertexSet::full(n)), &sched);
                assert!(f.infected.is_full());
            }
        }
    }

    #[test]
    fn run_q2_examples() {
        let g = q2();
        let t = run_to_fixpoint(&g, &set(4, &[0]), &ThresholdSchedule::constant(1), None).unwrap();
        assert!(t.percolated);
        assert_eq!(t.rounds_to_fixpoint, 2);
        assert_eq!(t.counts, vec![1, 3, 4]);

        let t = run_to_fixpoint(&g, &set(4, &[0, 1]), &ThresholdSchedule::constant(2), None)
            .unwrap();
        assert!(!t.percolated);
        assert_eq!(t.final_set.to_vec(), vec![0, 1]);
        assert_eq!(t.rounds_to_fixpoint, 0);

        let t = run_to_fixpoint(&g, &set(4, &[0, 3]), &ThresholdSchedule::constant(2), None)
            .unwrap();
        assert!(t.percolated);
        assert_eq!(t.rounds_to_fixpoint, 1);
    }

    #[test]
    fn round_cap_is_reported() {
        let g = Graph::torus(9, 1).unwrap();
        let err = run_to_fixpoint(&g, &set(9, &[0]), &ThresholdSchedule::constant(1), Some(2))
            .unwrap_err();
        assert_eq!(err, EngineError::RoundCap { cap: 2 });
    }

    #[test]
    fn trace_csv() {
        let g = q2();
        let t = run_to_fixpoint(&g, &set(4, &[0]), &ThresholdSchedule::constant(1), None).unwrap();
        let mut out = Vec::new();
        t.write_csv(&mut out).unwrap();
        assert_eq!(
            String::from_utf8(out).unwrap(),
            "round,infected_count,new_count\n0,1,1\n1,3,2\n2,4,1\n"
        );
    }

    #[test]
    fn relaxed_run_continues_through_stationary_rounds() {
        // Nothing can happen from the empty set; the run still terminates
        // after the relaxed rounds and reports round 0.
        let g = Graph::hypercube(4).unwrap();
        let t = run_to_fixpoint(&g, &VertexSet::empty(16), &ThresholdSchedule::bootk(2, 3, 1), None)
            .unwrap();
        assert_eq!(t.rounds_to_fixpoint, 0);
        assert_eq!(t.counts, vec![0]);
    }

    #[test]
    fn dominance_rejects_incomparable() {
        let g = q2();
        let err = dominance_check(
            &g,
            &set(4, &[0]),
            &ThresholdSchedule::constant(1),
            &ThresholdSchedule::constant(2),
        )
        .unwrap_err();
        assert!(matches!(err, EngineError::NotComparable { round: 0, .. }));
    }

    #[test]
    fn dominance_same_schedule() {
        let g = Graph::hypercube(5).unwrap();
        let s = ThresholdSchedule::majority(5);
        assert!(dominance_check(&g, &set(32, &[0, 3, 5, 6, 9, 17, 30]), &s, &s).unwrap());
    }

    #[test]
    fn retained_rounds_reconstruct_sets() {
        let g = q2();
        let t = Simulator::new(&g)
            .run(
                &set(4, &[0]),
                &ThresholdSchedule::constant(1),
                RunOptions {
                    max_rounds: None,
                    retain_rounds: true,
                },
            )
            .unwrap();
        assert_eq!(t.set_at_round(0).unwrap().to_vec(), vec![0]);
        assert_eq!(t.set_at_round(1).unwrap().to_vec(), vec![0, 1, 2]);
        assert_eq!(t.set_at_round(7).unwrap().to_vec(), vec![0, 1, 2, 3]);
    }
}
