//! Incremental neighbour-count kernel for arbitrary regular graphs.
//!
//! Each vertex keeps `|Γ(v) ∩ A⁽ᵐ⁾|`. After a round only neighbours of the
//! newly infected vertices can have changed counts, so with non-decreasing
//! thresholds they are the only candidates. A full scan is done in round 0
//! and whenever the threshold drops.

use super::{EngineError, ThresholdSchedule};
use crate::bitset::VertexSet;
use crate::graph::{Graph, VertexId};

pub(super) struct Scratch {
    hits: Vec<u32>,
    marked: VertexSet,
    candidates: Vec<VertexId>,
    fresh: Vec<VertexId>,
    joined: Vec<VertexId>,
}

impl Scratch {
    pub(super) fn new(n: usize) -> Self {
        Self {
            hits: vec![0; n],
            marked: VertexSet::empty(n),
            candidates: Vec::new(),
            fresh: Vec::new(),
            joined: Vec::new(),
        }
    }

    pub(super) fn run(
        &mut self,
        g: &Graph,
        initial: &VertexSet,
        sched: &ThresholdSchedule,
        cap: usize,
        mut rounds: Option<&mut [u32]>,
    ) -> Result<(Vec<usize>, VertexSet), EngineError> {
        let n = g.order();
        let mut infected = initial.clone();
        self.hits.iter_mut().for_each(|h| *h = 0);
        for v in infected.iter() {
            g.for_each_neighbor(v, |u| self.hits[u as usize] += 1);
        }
        let mut count = infected.count();
        let mut counts = vec![count];
        let k = sched.relaxed_rounds();
        self.fresh.clear();
        let mut prev_threshold = u32::MAX;
        let mut m = 0usize;
        loop {
            if m >= cap {
                return Err(EngineError::RoundCap { cap });
            }
            let threshold = sched.threshold_at(m);
            self.joined.clear();
            if count < n {
                if m == 0 || threshold < prev_threshold {
                    for v in 0..n as VertexId {
                        if !infected.contains(v) && self.hits[v as usize] >= threshold {
                            self.joined.push(v);
                        }
                    }
                } else {
                    self.candidates.clear();
                    for &v in &self.fresh {
                        g.for_each_neighbor(v, |u| {
                            if !infected.contains(u) && self.marked.insert(u) {
                                self.candidates.push(u);
                            }
                        });
                    }
                    for &u in &self.candidates {
                        self.marked.remove(u);
                        if self.hits[u as usize] >= threshold {
                            self.joined.push(u);
                        }
                    }
                }
            }
            prev_threshold = threshold;
            if self.joined.is_empty() && m >= k {
                break;
            }
            for &v in &self.joined {
                infected.insert(v);
                if let Some(r) = rounds.as_deref_mut() {
                    r[v as usize] = (m + 1) as u32;
                }
            }
            for &v in &self.joined {
                g.for_each_neighbor(v, |u| self.hits[u as usize] += 1);
            }
            count += self.joined.len();
            counts.push(count);
            std::mem::swap(&mut self.fresh, &mut self.joined);
            m += 1;
        }
        Ok((counts, infected))
    }
}
