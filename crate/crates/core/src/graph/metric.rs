//! Breadth-first geometry: distances, spheres `S(x,k)`, balls `B(x,k)` and
//! the sphere-neighbour profile.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Graph, GraphError, VertexId};

pub(crate) const UNSEEN: u32 = u32::MAX;

/// Work budget (vertex-neighbour visits) for an exhaustive profile scan.
pub const PROFILE_BUDGET: u128 = 10_000_000_000;

/// Reusable bounded BFS. Only touched entries are reset between runs, so
/// repeated small-radius searches on a large graph stay cheap.
pub(crate) struct Bfs {
    dist: Vec<u32>,
    order: Vec<VertexId>,
}

impl Bfs {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            dist: vec![UNSEEN; n],
            order: Vec::new(),
        }
    }

    /// Visit every vertex within `max_depth` of `src`; see [`Bfs::visited`].
    pub(crate) fn run(&mut self, g: &Graph, src: VertexId, max_depth: u32) {
        for &v in &self.order {
            self.dist[v as usize] = UNSEEN;
        }
        self.order.clear();
        self.dist[src as usize] = 0;
        self.order.push(src);
        let mut head = 0;
        while head < self.order.len() {
            let v = self.order[head];
            head += 1;
            let dv = self.dist[v as usize];
            if dv == max_depth {
                continue;
            }
            let dist = &mut self.dist;
            let order = &mut self.order;
            g.for_each_neighbor(v, |u| {
                if dist[u as usize] == UNSEEN {
                    dist[u as usize] = dv + 1;
                    order.push(u);
                }
            });
        }
    }

    /// Vertices reached by the last run, in non-decreasing distance.
    pub(crate) fn visited(&self) -> &[VertexId] {
        &self.order
    }

    #[inline]
    pub(crate) fn dist(&self, v: VertexId) -> u32 {
        self.dist[v as usize]
    }
}

impl Graph {
    /// Distances from `x` to every vertex; `None` for other components.
    pub fn distances_from(&self, x: VertexId) -> Vec<Option<u32>> {
        let mut bfs = Bfs::new(self.order());
        bfs.run(self, x, u32::MAX);
        (0..self.order() as VertexId)
            .map(|v| Some(bfs.dist(v)).filter(|&d| d != UNSEEN))
            .collect()
    }

    /// `S(x, k)`: vertices at distance exactly `k` from `x`, ascending.
    pub fn sphere(&self, x: VertexId, k: u32) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(x as u64)?;
        let mut bfs = Bfs::new(self.order());
        bfs.run(self, x, k);
        let visited = bfs.visited();
        let mut out: Vec<VertexId> = visited
            .iter()
            .copied()
            .filter(|&v| bfs.dist(v) == k)
            .collect();
        out.sort_unstable();
        Ok(out)
    }

    /// `B(x, k)`: vertices at distance at most `k` from `x`, ascending.
    pub fn ball(&self, x: VertexId, k: u32) -> Result<Vec<VertexId>, GraphError> {
        self.check_vertex(x as u64)?;
        let mut bfs = Bfs::new(self.order());
        bfs.run(self, x, k);
        let mut out = bfs.visited().to_vec();
        out.sort_unstable();
        Ok(out)
    }

    /// Sizes `|S(x, 0)|, |S(x, 1)|, …` up to the eccentricity of `x`.
    pub fn sphere_sizes(&self, x: VertexId) -> Result<Vec<usize>, GraphError> {
        self.check_vertex(x as u64)?;
        let mut bfs = Bfs::new(self.order());
        bfs.run(self, x, u32::MAX);
        let visited = bfs.visited();
        let mut sizes = Vec::new();
        for &v in visited {
            let d = bfs.dist(v) as usize;
            if sizes.len() <= d {
                sizes.resize(d + 1, 0);
            }
            sizes[d] += 1;
        }
        Ok(sizes)
    }
}

/// How [`SphereNeighborProfile::compute`] chooses centres `x`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ProfileMode {
    /// Every vertex is a centre; the result is exact.
    Exhaustive,
    /// `samples` seeded random centres; each `f_i` is a lower bound.
    Sampled { samples: usize, seed: u64 },
}

/// `f_i = max |S(x,i) ∩ Γ(y)|` over all `x` and all `y ∉ B(x, i-1)`, for
/// `i = 1..=k`, floored at 1.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SphereNeighborProfile {
    values: Vec<u32>,
    exact: bool,
}

impl SphereNeighborProfile {
    /// Wrap caller-supplied values `f_1..=f_k` (e.g. a proven bound such as
    /// `f_i = i + 1`). Values below 1 are raised to 1.
    pub fn from_values(values: Vec<u32>) -> Self {
        Self {
            values: values.into_iter().map(|f| f.max(1)).collect(),
            exact: true,
        }
    }

    pub fn compute(g: &Graph, k: u32, mode: ProfileMode) -> Result<Self, GraphError> {
        if k == 0 {
            return Ok(Self {
                values: Vec::new(),
                exact: true,
            });
        }
        let n = g.order();
        let mut bfs = Bfs::new(n);
        let centres: Vec<VertexId> = match mode {
            ProfileMode::Exhaustive => {
                bfs.run(g, 0, k + 1);
                let reach = bfs.visited().len() as u128;
                let needed = n as u128 * reach * g.degree() as u128;
                if needed > PROFILE_BUDGET {
                    return Err(GraphError::BudgetExceeded {
                        needed,
                        budget: PROFILE_BUDGET,
                    });
                }
                (0..n as VertexId).collect()
            }
            ProfileMode::Sampled { samples, seed } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..samples)
                    .map(|_| rng.gen_range(0..n as u64) as VertexId)
                    .collect()
            }
        };
        let mut best = vec![0u32; k as usize + 1];
        for &x in &centres {
            // y with d(x,y) = dy has neighbours only at dy-1, dy, dy+1; the
            // last never count since they lie outside B(x, dy).
            bfs.run(g, x, k + 1);
            for &y in bfs.visited() {
                let dy = bfs.dist(y);
                if dy == 0 {
                    continue;
                }
                let (mut down, mut same) = (0u32, 0u32);
                g.for_each_neighbor(y, |z| {
                    let dz = bfs.dist(z);
                    if dz == UNSEEN {
                        return;
                    }
                    if dz + 1 == dy {
                        down += 1;
                    } else if dz == dy {
                        same += 1;
                    }
                });
                let i = (dy - 1) as usize;
                if (1..=k as usize).contains(&i) {
                    best[i] = best[i].max(down);
                }
                if dy <= k {
                    best[dy as usize] = best[dy as usize].max(same);
                }
            }
        }
        Ok(Self {
            values: best[1..].iter().map(|&f| f.max(1)).collect(),
            exact: matches!(mode, ProfileMode::Exhaustive),
        })
    }

    /// Largest radius covered.
    pub fn max_radius(&self) -> u32 {
        self.values.len() as u32
    }

    /// `f_i`. `f_0` is 1: `S(x,0) = {x}` meets any neighbourhood at most once.
    pub fn f(&self, i: u32) -> Option<u32> {
        if i == 0 {
            Some(1)
        } else {
            self.values.get(i as usize - 1).copied()
        }
    }

    /// `f_1..=f_k`.
    pub fn values(&self) -> &[u32] {
        &self.values
    }

    /// `false` when computed from sampled centres (values are lower bounds).
    pub fn is_exact(&self) -> bool {
        self.exact
    }
}
