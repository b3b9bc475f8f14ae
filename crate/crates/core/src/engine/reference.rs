//! Naive reference dynamics: adjacency lists and sorted vectors, two
//! explicit buffers per round. Slow on purpose; used as an oracle.

use super::ThresholdSchedule;
use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReferenceTrace {
    pub counts: Vec<usize>,
    pub rounds_to_fixpoint: usize,
    pub percolated: bool,
    pub final_set: Vec<VertexId>,
}

pub fn adjacency_lists(g: &Graph) -> Vec<Vec<VertexId>> {
    (0..g.order() as VertexId).map(|v| g.neighbors(v)).collect()
}

/// One round: returns the sorted set `A⁽ᵐ⁺¹⁾` given sorted `current = A⁽ᵐ⁾`.
pub fn step(adj: &[Vec<VertexId>], current: &[VertexId], threshold: u32) -> Vec<VertexId> {
    let mut next = current.to_vec();
    for (v, nbrs) in adj.iter().enumerate() {
        let v = v as VertexId;
        if current.binary_search(&v).is_ok() {
            continue;
        }
        let hits = nbrs
            .iter()
            .filter(|u| current.binary_search(u).is_ok())
            .count();
        if hits as u32 >= threshold {
            next.push(v);
        }
    }
    next.sort_unstable();
    next
}

/// Run to the fixpoint with the same stopping rule as the fast engine: stop
/// at the first round `m ≥ k` that adds nothing.
pub fn run(g: &Graph, initial: &[VertexId], sched: &ThresholdSchedule) -> ReferenceTrace {
    let adj = adjacency_lists(g);
    let mut current: Vec<VertexId> = initial.to_vec();
    current.sort_unstable();
    current.dedup();
    let mut counts = vec![current.len()];
    let k = sched.relaxed_rounds();
    let mut m = 0;
    loop {
        let next = step(&adj, &current, sched.threshold_at(m));
        if next.len() == current.len() && m >= k {
            break;
        }
        counts.push(next.len());
        current = next;
        m += 1;
    }
    while counts.len() > 1 && counts[counts.len() - 1] == counts[counts.len() - 2] {
        counts.pop();
    }
    ReferenceTrace {
        rounds_to_fixpoint: counts.len() - 1,
        percolated: current.len() == g.order(),
        counts,
        final_set: current,
    }
}
