//! Greedy distance partitions: split a vertex set into classes whose
//! members are pairwise far apart, so that events depending on disjoint
//! neighbourhoods are independent within a class.
//!
//! All builders visit vertices in ascending `VertexId` and put each one in
//! the first class it is compatible with.

mod audit;
mod verify;

use thiserror::Error;

pub use audit::{independence_audit, AuditError, AuditReport};
pub use verify::{verify_partition, PartitionVerdict};

use crate::graph::metric::Bfs;
use crate::graph::{Graph, GraphError, SphereNeighborProfile, VertexId};

/// Upper limit on `|S(x,k)|` for [`hypercube_sphere_partition`].
pub const MAX_SPHERE: u64 = 10_000_000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum PartitionError {
    #[error("|B({vertex}, {radius})| = {size} exceeds the class budget {budget}")]
    BallTooLarge {
        vertex: VertexId,
        radius: u32,
        size: usize,
        budget: usize,
    },
    #[error("profile violated at y = {vertex}: {detail}")]
    ProfileViolated { vertex: VertexId, detail: String },
    #[error("{0}")]
    Domain(String),
    #[error(transparent)]
    Graph(#[from] GraphError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DistancePartition {
    /// Each class in ascending vertex order; classes in order of creation.
    pub classes: Vec<Vec<VertexId>>,
    /// Guaranteed lower bound on distances within a class.
    pub min_distance: u32,
    /// Bound on the number of classes promised by the construction.
    pub class_bound: u64,
}

impl DistancePartition {
    pub fn len(&self) -> usize {
        self.classes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.classes.is_empty()
    }

    pub fn class_sizes(&self) -> Vec<usize> {
        self.classes.iter().map(Vec::len).collect()
    }
}

const NO_CLASS: u32 = u32::MAX;

/// First-fit class assignment: `conflicts(v, f)` calls `f` on every
/// already-placed vertex too close to `v`.
fn first_fit<F>(n: usize, order: &[VertexId], mut conflicts: F) -> Vec<Vec<VertexId>>
where
    F: FnMut(VertexId, &mut dyn FnMut(VertexId)),
{
    let mut class_of = vec![NO_CLASS; n];
    let mut classes: Vec<Vec<VertexId>> = Vec::new();
    let mut blocked: Vec<bool> = Vec::new();
    for &v in order {
        blocked.iter_mut().for_each(|b| *b = false);
        conflicts(v, &mut |u| {
            let c = class_of[u as usize];
            if c != NO_CLASS {
                blocked[c as usize] = true;
            }
        });
        let c = blocked.iter().position(|b| !b).unwrap_or(classes.len());
        if c == classes.len() {
            classes.push(Vec::new());
            blocked.push(false);
        }
        class_of[v as usize] = c as u32;
        classes[c].push(v);
    }
    classes
}

/// Partition `vertices` into at most `m` classes with pairwise distance at
/// least `k + 1`, given `|B(x,k)| ≤ m` for every input vertex.
pub fn greedy_distance_partition(
    g: &Graph,
    vertices: &[VertexId],
    k: u32,
    m: usize,
) -> Result<DistancePartition, PartitionError> {
    let mut order = vertices.to_vec();
    for &v in &order {
        g.check_vertex(u64::from(v))?;
    }
    order.sort_unstable();
    order.dedup();
    let mut bfs = Bfs::new(g.order());
    for &v in &order {
        bfs.run(g, v, k);
        let size = bfs.visited().len();
        if size > m {
            return Err(PartitionError::BallTooLarge {
                vertex: v,
                radius: k,
                size,
                budget: m,
            });
        }
    }
    let classes = first_fit(g.order(), &order, |v, f| {
        bfs.run(g, v, k);
        bfs.visited().iter().for_each(|&u| f(u));
    });
    Ok(DistancePartition {
        classes,
        min_distance: k + 1,
        class_bound: m as u64,
    })
}

/// `k · C(n, k-1)`.
pub fn hypercube_class_bound(n: u32, k: u32) -> u64 {
    u64::from(k) * binomial(u64::from(n), u64::from(k) - 1)
}

fn binomial(n: u64, k: u64) -> u64 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * u128::from(n - i) / u128::from(i + 1)) as u64
}

/// Partition `S(x,k)` in `Q_n` into at most `k·C(n,k-1)` classes with
/// pairwise Hamming distance at least `2k`. After translating `x` to the
/// empty set, the sphere is the `k`-subsets of `[n]` and distance `2k`
/// means disjoint subsets.
pub fn hypercube_sphere_partition(n: u32, x: VertexId, k: u32) -> Result<DistancePartition, PartitionError> {
    if !(1..=30).contains(&n) || k == 0 || k > n {
        return Err(PartitionError::Domain(format!("need 1 <= k <= n <= 30, got n={n}, k={k}")));
    }
    if u64::from(x) >> n != 0 {
        return Err(GraphError::VertexOutOfRange {
            vertex: u64::from(x),
            order: 1 << n,
        }
        .into());
    }
    if binomial(u64::from(n), u64::from(k)) > MAX_SPHERE {
        return Err(PartitionError::Domain(format!("|S(x,{k})| in Q_{n} exceeds {MAX_SPHERE}")));
    }
    let mut sphere: Vec<VertexId> = k_subsets(n, k).map(|s| x ^ s).collect();
    sphere.sort_unstable();
    // union of the (translated) members of each class
    let mut unions: Vec<u32> = Vec::new();
    let mut classes: Vec<Vec<VertexId>> = Vec::new();
    for v in sphere {
        let s = v ^ x;
        match unions.iter().position(|&u| u & s == 0) {
            Some(c) => {
                unions[c] |= s;
                classes[c].push(v);
            }
            None => {
                unions.push(s);
                classes.push(vec![v]);
            }
        }
    }
    Ok(DistancePartition {
        classes,
        min_distance: 2 * k,
        class_bound: hypercube_class_bound(n, k),
    })
}

/// Bitmasks with exactly `k` of the low `n` bits set, in increasing order.
fn k_subsets(n: u32, k: u32) -> impl Iterator<Item = u32> {
    let first = (1u64 << k) - 1;
    let limit = 1u64 << n;
    std::iter::successors(Some(first), move |&s| {
        // Gosper's hack
        let c = s & s.wrapping_neg();
        let r = s + c;
        let next = (((r ^ s) >> 2) / c) | r;
        (next < limit).then_some(next)
    })
    .map(|s| s as u32)
}

/// Partition `S(x,k)` into at most `d(f_{k-1} + f_k) + 1` classes with
/// pairwise distance at least 3, checking along the way that the graph
/// respects the given profile wherever the counting argument uses it.
pub fn general_sphere_partition(
    g: &Graph,
    x: VertexId,
    k: u32,
    profile: &SphereNeighborProfile,
) -> Result<DistancePartition, PartitionError> {
    g.check_vertex(u64::from(x))?;
    if k == 0 {
        return Err(PartitionError::Domain("radius must be at least 1".into()));
    }
    let (Some(f_prev), Some(f_k)) = (profile.f(k - 1), profile.f(k)) else {
        return Err(PartitionError::Domain(format!(
            "profile covers radii up to {}, need {k}",
            profile.max_radius()
        )));
    };
    let d = g.degree() as u64;
    let bound = d * u64::from(f_prev + f_k) + 1;

    let n = g.order();
    let mut from_x = Bfs::new(n);
    from_x.run(g, x, k + 1);
    let dist = |v: VertexId| from_x.dist(v);
    let sphere: Vec<VertexId> = {
        let mut s: Vec<VertexId> = from_x.visited().iter().copied().filter(|&v| dist(v) == k).collect();
        s.sort_unstable();
        s
    };
    let count_at = |w: VertexId, r: u32| {
        let mut c = 0u32;
        g.for_each_neighbor(w, |u| c += u32::from(dist(u) == r));
        c
    };
    let mut near = Bfs::new(n);
    for &y in &sphere {
        let down = count_at(y, k - 1);
        if down > f_prev {
            return Err(violation(y, format!("|S(x,{}) ∩ Γ(y)| = {down} > f = {f_prev}", k - 1)));
        }
        let mut bad = None;
        g.for_each_neighbor(y, |w| {
            let dw = dist(w);
            if bad.is_none() && dw != crate::graph::metric::UNSEEN && dw >= k {
                let c = count_at(w, k);
                if c > f_k {
                    bad = Some((w, c));
                }
            }
        });
        if let Some((w, c)) = bad {
            return Err(violation(y, format!("|S(x,{k}) ∩ Γ({w})| = {c} > f = {f_k}")));
        }
        near.run(g, y, 2);
        let close = near.visited().iter().filter(|&&z| dist(z) == k).count() as u64;
        if close > bound {
            return Err(violation(y, format!("|B(y,2) ∩ S(x,{k})| = {close} > {bound}")));
        }
    }
    let classes = first_fit(n, &sphere, |y, f| {
        near.run(g, y, 2);
        near.visited().iter().filter(|&&z| dist(z) == k).for_each(|&z| f(z));
    });
    Ok(DistancePartition {
        classes,
        min_distance: 3,
        class_bound: bound,
    })
}

fn violation(vertex: VertexId, detail: String) -> PartitionError {
    PartitionError::ProfileViolated { vertex, detail }
}
