//! Regular graph families: hypercubes, tori, explicit adjacency and
//! disjoint unions.
//!
//! Hypercube and torus neighbourhoods are generated arithmetically; only
//! explicit graphs store adjacency. Every constructor validates that the
//! result is simple, symmetric and exactly regular.

mod build;
pub(crate) mod metric;

pub use build::{parse_adjacency, random_regular, GraphSpec};
pub use metric::{ProfileMode, SphereNeighborProfile, PROFILE_BUDGET};

use thiserror::Error;

/// Index of a vertex in `[0, N)`.
///
/// For `hypercube:n` the binary digits of the index are the indicator
/// vector of a subset of `{1, …, n}` (bit `i` ↔ element `i + 1`).
/// For `torus:n^d` the index is `Σ x_i · n^i` for coordinates `x_i ∈ [0, n)`.
pub type VertexId = u32;

/// Largest vertex count any constructor accepts.
pub const MAX_VERTICES: usize = 1 << 30;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("malformed graph spec `{spec}`: {reason}")]
    MalformedSpec { spec: String, reason: String },
    #[error("adjacency file line {line}: {reason}")]
    Adjacency { line: usize, reason: String },
    #[error("adjacency is not symmetric: {u} lists {v} but {v} does not list {u}")]
    Asymmetric { u: VertexId, v: VertexId },
    #[error("random regular graph needs N·d even (N = {n}, d = {d})")]
    OddDegreeSum { n: usize, d: usize },
    #[error("random regular graph: no simple pairing found after {restarts} restarts")]
    PairingFailed { restarts: u32 },
    #[error("disjoint union parts have different degrees ({0} and {1})")]
    MixedDegree(usize, usize),
    #[error("graph would have {0} vertices, above the cap of 2^30")]
    TooLarge(u128),
    #[error("vertex {vertex} out of range for a graph on {order} vertices")]
    VertexOutOfRange { vertex: u64, order: usize },
    #[error("io error reading `{path}`: {message}")]
    Io { path: String, message: String },
    #[error("exhaustive profile needs {needed} work units, budget is {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
}

/// Which construction a [`Graph`] came from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Hypercube { dim: u32 },
    Torus { side: u32, dim: u32 },
    Explicit,
    DisjointUnion { parts: usize },
}

#[derive(Debug, Clone)]
enum Kind {
    Hypercube {
        dim: u32,
    },
    Torus {
        side: u32,
        dim: u32,
        /// `side^i` for each axis.
        strides: Vec<u32>,
    },
    Explicit {
        /// Row-major `order × degree`, each row sorted ascending.
        adj: Vec<VertexId>,
    },
    Union {
        parts: Vec<Graph>,
        /// Index of the first vertex of each part, plus a final `order`.
        offsets: Vec<usize>,
    },
}

/// An immutable, simple, `degree`-regular graph.
#[derive(Debug, Clone)]
pub struct Graph {
    kind: Kind,
    order: usize,
    degree: usize,
}

impl Graph {
    /// The hypercube `Q_dim` on `2^dim` vertices.
    pub fn hypercube(dim: u32) -> Result<Self, GraphError> {
        if !(1..=30).contains(&dim) {
            return Err(GraphError::MalformedSpec {
                spec: format!("hypercube:{dim}"),
                reason: "dimension must be in 1..=30".into(),
            });
        }
        Ok(Self {
            kind: Kind::Hypercube { dim },
            order: 1 << dim,
            degree: dim as usize,
        })
    }

    /// The torus `[side]^dim`: the product of `dim` cycles of length `side`.
    ///
    /// For `side = 2` the two directions along an axis coincide, giving
    /// degree `dim` (this is the hypercube); otherwise the degree is `2·dim`.
    pub fn torus(side: u32, dim: u32) -> Result<Self, GraphError> {
        let spec = || format!("torus:{side}^{dim}");
        if side < 2 {
            return Err(GraphError::MalformedSpec {
                spec: spec(),
                reason: "side length must be at least 2".into(),
            });
        }
        if dim < 1 {
            return Err(GraphError::MalformedSpec {
                spec: spec(),
                reason: "dimension must be at least 1".into(),
            });
        }
        let order = (side as u128).checked_pow(dim).unwrap_or(u128::MAX);
        if order > MAX_VERTICES as u128 {
            return Err(GraphError::TooLarge(order));
        }
        let strides = (0..dim).map(|i| side.pow(i)).collect();
        let degree = if side == 2 { dim } else { 2 * dim } as usize;
        Ok(Self {
            kind: Kind::Torus {
                side,
                dim,
                strides,
            },
            order: order as usize,
            degree,
        })
    }

    /// Build from neighbour lists, checking regularity, simplicity and symmetry.
    pub fn from_adjacency(lists: Vec<Vec<VertexId>>) -> Result<Self, GraphError> {
        let order = lists.len();
        if order > MAX_VERTICES {
            return Err(GraphError::TooLarge(order as u128));
        }
        let degree = lists.first().map_or(0, Vec::len);
        let mut adj = Vec::with_capacity(order * degree);
        for (u, list) in lists.iter().enumerate() {
            let line = u + 2;
            if list.len() != degree {
                return Err(GraphError::Adjacency {
                    line,
                    reason: format!("vertex {u} has {} neighbours, expected {degree}", list.len()),
                });
            }
            let mut row = list.clone();
            row.sort_unstable();
            for w in row.windows(2) {
                if w[0] == w[1] {
                    return Err(GraphError::Adjacency {
                        line,
                        reason: format!("duplicate neighbour {}", w[0]),
                    });
                }
            }
            for &v in &row {
                if v as usize >= order {
                    return Err(GraphError::Adjacency {
                        line,
                        reason: format!("neighbour {v} out of range"),
                    });
                }
                if v as usize == u {
                    return Err(GraphError::Adjacency {
                        line,
                        reason: format!("self-loop at {u}"),
                    });
                }
            }
            adj.extend_from_slice(&row);
        }
        for u in 0..order {
            for &v in &adj[u * degree..(u + 1) * degree] {
                let row = &adj[v as usize * degree..(v as usize + 1) * degree];
                if row.binary_search(&(u as VertexId)).is_err() {
                    return Err(GraphError::Asymmetric {
                        u: u as VertexId,
                        v,
                    });
                }
            }
        }
        Ok(Self {
            kind: Kind::Explicit { adj },
            order,
            degree,
        })
    }

    /// Disjoint union `H_1 ∪ … ∪ H_M`; vertices of part `j` follow those of
    /// part `j - 1`. All parts must share one degree.
    pub fn disjoint_union(parts: Vec<Graph>) -> Result<Self, GraphError> {
        let Some(first) = parts.first() else {
            return Err(GraphError::MalformedSpec {
                spec: "union:".into(),
                reason: "union needs at least one part".into(),
            });
        };
        let degree = first.degree;
        let mut offsets = Vec::with_capacity(parts.len() + 1);
        let mut order = 0usize;
        for part in &parts {
            if part.degree != degree {
                return Err(GraphError::MixedDegree(degree, part.degree));
            }
            offsets.push(order);
            order += part.order;
            if order > MAX_VERTICES {
                return Err(GraphError::TooLarge(order as u128));
            }
        }
        offsets.push(order);
        Ok(Self {
            kind: Kind::Union { parts, offsets },
            order,
            degree,
        })
    }

    /// Parse and build from a spec string such as `hypercube:10`.
    pub fn from_spec(spec: &str) -> Result<Self, GraphError> {
        spec.parse::<GraphSpec>()?.build()
    }

    /// Number of vertices `N`.
    #[inline]
    pub fn order(&self) -> usize {
        self.order
    }

    #[inline]
    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn family(&self) -> Family {
        match &self.kind {
            Kind::Hypercube { dim } => Family::Hypercube { dim: *dim },
            Kind::Torus { side, dim, .. } => Family::Torus {
                side: *side,
                dim: *dim,
            },
            Kind::Explicit { .. } => Family::Explicit,
            Kind::Union { parts, .. } => Family::DisjointUnion { parts: parts.len() },
        }
    }

    /// Dimension if this is a hypercube (a `torus:2^d` counts too).
    pub fn hypercube_dim(&self) -> Option<u32> {
        match &self.kind {
            Kind::Hypercube { dim } => Some(*dim),
            _ => None,
        }
    }

    pub fn check_vertex(&self, v: u64) -> Result<VertexId, GraphError> {
        if (v as u128) < self.order as u128 {
            Ok(v as VertexId)
        } else {
            Err(GraphError::VertexOutOfRange {
                vertex: v,
                order: self.order,
            })
        }
    }

    /// Call `f` once for every neighbour of `v`.
    #[inline]
    pub fn for_each_neighbor<F: FnMut(VertexId)>(&self, v: VertexId, mut f: F) {
        self.visit(v, 0, &mut f)
    }

    fn visit<F: FnMut(VertexId)>(&self, v: VertexId, base: u32, f: &mut F) {
        match &self.kind {
            Kind::Hypercube { dim } => {
                for i in 0..*dim {
                    f(base + (v ^ (1 << i)));
                }
            }
            Kind::Torus {
                side,
                dim,
                strides,
            } => {
                let side = *side;
                for &stride in &strides[..*dim as usize] {
                    let coord = (v / stride) % side;
                    let up = if coord + 1 == side { v - coord * stride } else { v + stride };
                    f(base + up);
                    if side > 2 {
                        let down = if coord == 0 { v + (side - 1) * stride } else { v - stride };
                        f(base + down);
                    }
                }
            }
            Kind::Explicit { adj } => {
                let d = self.degree;
                for &u in &adj[v as usize * d..(v as usize + 1) * d] {
                    f(base + u);
                }
            }
            Kind::Union { parts, offsets } => {
                let j = offsets.partition_point(|&o| o <= v as usize) - 1;
                let off = offsets[j] as u32;
                parts[j].visit(v - off, base + off, f);
            }
        }
    }

    pub fn neighbors(&self, v: VertexId) -> Vec<VertexId> {
        let mut out = Vec::with_capacity(self.degree);
        self.for_each_neighbor(v, |u| out.push(u));
        out
    }

    /// Vertex ranges of the top-level union parts, or the whole range.
    pub fn components_hint(&self) -> Vec<std::ops::Range<usize>> {
        match &self.kind {
            Kind::Union { offsets, .. } => offsets.windows(2).map(|w| w[0]..w[1]).collect(),
            _ => std::iter::once(0..self.order).collect(),
        }
    }

    /// Serialize in the adjacency file format (`N d` header, one sorted
    /// neighbour list per line, LF endings).
    pub fn to_adjacency_string(&self) -> String {
        use std::fmt::Write;
        let mut out = String::new();
        let _ = writeln!(out, "{} {}", self.order, self.degree);
        let mut row = Vec::with_capacity(self.degree);
        for v in 0..self.order as VertexId {
            row.clear();
            self.for_each_neighbor(v, |u| row.push(u));
            row.sort_unstable();
            let line: Vec<String> = row.iter().map(u32::to_string).collect();
            let _ = writeln!(out, "{}", line.join(" "));
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn assert_regular_symmetric(g: &Graph) {
        for v in 0..g.order() as VertexId {
            let mut nb = g.neighbors(v);
            assert_eq!(nb.len(), g.degree(), "vertex {v}");
            nb.sort_unstable();
            nb.dedup();
            assert_eq!(nb.len(), g.degree(), "duplicate neighbour at {v}");
            for u in nb {
                assert_ne!(u, v);
                assert!(g.neighbors(u).contains(&v));
            }
        }
    }

    #[test]
    fn hypercube_two() {
        let g = Graph::from_spec("hypercube:2").unwrap();
        assert_eq!((g.order(), g.degree()), (4, 2));
        assert_eq!(g.neighbors(0), vec![1, 2]);
        assert_regular_symmetric(&g);
    }

    #[test]
    fn hypercube_edges_are_hamming_one() {
        let g = Graph::hypercube(7).unwrap();
        for v in 0..g.order() as VertexId {
            for u in g.neighbors(v) {
                assert_eq!((u ^ v).count_ones(), 1);
            }
        }
    }

    #[test]
    fn torus_three_squared() {
        let g = Graph::from_spec("torus:3^2").unwrap();
        assert_eq!((g.order(), g.degree()), (9, 4));
        assert_regular_symmetric(&g);
    }

    #[test]
    fn torus_side_two_is_hypercube() {
        let t = Graph::torus(2, 5).unwrap();
        let q = Graph::hypercube(5).unwrap();
        assert_eq!(t.degree(), 5);
        assert_eq!(t.to_adjacency_string(), q.to_adjacency_string());
    }

    #[test]
    fn torus_families_are_regular() {
        for (n, d) in [(3, 1), (4, 2), (5, 3), (2, 3), (7, 2)] {
            assert_regular_symmetric(&Graph::torus(n, d).unwrap());
        }
    }

    #[test]
    fn union_of_squares() {
        let g = Graph::from_spec("union:hypercube:2+hypercube:2").unwrap();
        assert_eq!((g.order(), g.degree()), (8, 2));
        assert_eq!(g.components_hint(), vec![0..4, 4..8]);
        assert_eq!(g.neighbors(5), vec![4, 7]);
        assert_regular_symmetric(&g);
    }

    #[test]
    fn union_rejects_mixed_degree() {
        let err = Graph::from_spec("union:hypercube:2+hypercube:3").unwrap_err();
        assert_eq!(err, GraphError::MixedDegree(2, 3));
    }

    #[test]
    fn torus_cap() {
        assert!(matches!(Graph::torus(2, 31), Err(GraphError::TooLarge(_))));
        assert!(matches!(Graph::torus(1000, 4), Err(GraphError::TooLarge(_))));
    }

    #[test]
    fn explicit_rejects_asymmetry() {
        let err = Graph::from_adjacency(vec![vec![1], vec![2], vec![0]]).unwrap_err();
        assert!(matches!(err, GraphError::Asymmetric { .. }));
    }

    #[test]
    fn explicit_rejects_self_loop_and_duplicates() {
        assert!(Graph::from_adjacency(vec![vec![0, 1], vec![0, 1]]).is_err());
        assert!(Graph::from_adjacency(vec![vec![1, 1], vec![0, 0]]).is_err());
    }
}
