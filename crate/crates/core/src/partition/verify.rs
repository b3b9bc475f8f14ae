//! Stand-alone checker for partitions. It runs its own plain BFS over
//! `Graph::neighbors` and shares nothing with the builders.

use std::collections::VecDeque;

use super::DistancePartition;
use crate::graph::{Graph, VertexId};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct PartitionVerdict {
    /// No vertex appears twice.
    pub disjoint: bool,
    /// The classes cover exactly the input set.
    pub covers: bool,
    /// Every within-class pair is at least `min_distance` apart.
    pub distance_ok: bool,
    /// At most `class_bound` classes.
    pub count_ok: bool,
    /// Within-class pairs examined.
    pub pairs_checked: u64,
}

impl PartitionVerdict {
    pub fn ok(&self) -> bool {
        self.disjoint && self.covers && self.distance_ok && self.count_ok
    }
}

pub fn verify_partition(g: &Graph, input: &[VertexId], part: &DistancePartition) -> PartitionVerdict {
    let n = g.order();
    let mut seen = vec![false; n];
    let mut disjoint = true;
    for &v in part.classes.iter().flatten() {
        if (v as usize) >= n || std::mem::replace(&mut seen[v as usize], true) {
            disjoint = false;
        }
    }
    let mut wanted = vec![false; n];
    for &v in input {
        wanted[v as usize] = true;
    }
    let covers = seen == wanted;

    let mut distance_ok = true;
    let mut pairs_checked = 0u64;
    let mut mark = vec![false; n];
    for class in &part.classes {
        let c = class.len() as u64;
        pairs_checked += c * c.saturating_sub(1) / 2;
        for &v in class {
            mark[v as usize] = true;
        }
        for &v in class {
            if reaches_marked(g, v, part.min_distance.saturating_sub(1), &mark) {
                distance_ok = false;
            }
        }
        for &v in class {
            mark[v as usize] = false;
        }
    }
    PartitionVerdict {
        disjoint,
        covers,
        distance_ok,
        count_ok: part.classes.len() as u64 <= part.class_bound,
        pairs_checked,
    }
}

/// Is any marked vertex other than `src` within `radius` of `src`?
fn reaches_marked(g: &Graph, src: VertexId, radius: u32, mark: &[bool]) -> bool {
    let mut depth = std::collections::HashMap::new();
    depth.insert(src, 0u32);
    let mut queue = VecDeque::from([src]);
    while let Some(v) = queue.pop_front() {
        let dv = depth[&v];
        if v != src && mark[v as usize] {
            return true;
        }
        if dv == radius {
            continue;
        }
        for u in g.neighbors(v) {
            if let std::collections::hash_map::Entry::Vacant(e) = depth.entry(u) {
                e.insert(dv + 1);
                queue.push_back(u);
            }
        }
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn catches_each_defect() {
        let g = Graph::torus(6, 1).unwrap();
        let input: Vec<VertexId> = (0..6).collect();
        let good = DistancePartition {
            classes: vec![vec![0, 2, 4], vec![1, 3, 5]],
            min_distance: 2,
            class_bound: 2,
        };
        assert!(verify_partition(&g, &input, &good).ok());

        let mut close = good.clone();
        close.classes = vec![vec![0, 1], vec![2, 4], vec![3, 5]];
        close.class_bound = 3;
        assert!(!verify_partition(&g, &input, &close).distance_ok);

        let mut dup = good.clone();
        dup.classes[1].push(0);
        assert!(!verify_partition(&g, &input, &dup).disjoint);

        let mut short = good.clone();
        short.classes[1].pop();
        assert!(!verify_partition(&g, &input, &short).covers);

        let mut many = good.clone();
        many.class_bound = 1;
        assert!(!verify_partition(&g, &input, &many).count_ok);
    }
}
