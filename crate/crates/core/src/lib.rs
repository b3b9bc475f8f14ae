//! Bootstrap percolation on regular graphs.
//!
//! Starting from an initial infected set `A⁽⁰⁾`, each synchronous round adds
//! every healthy vertex with at least `r` infected neighbours; infected
//! vertices never recover. The set *percolates* if it eventually covers the
//! whole graph. This crate provides:
//!
//! - [`graph`]: hypercubes `Q_n`, tori `[n]^d`, explicit and random regular
//!   graphs, disjoint unions, BFS spheres/balls and the sphere-neighbour
//!   profile `f_i`.
//! - [`engine`]: the synchronous dynamics under constant thresholds or
//!   relaxed `Bootk(t)` schedules, a bit-sliced hypercube kernel, a naive
//!   reference implementation, and coupling-dominance checks.
//! - [`sampler`]: monotonically coupled Bernoulli initial sets, Monte Carlo
//!   percolation probabilities with Wilson intervals, critical-probability
//!   bisection and an exact brute-force oracle for small graphs.
//! - [`bounds`]: Chernoff-type tail bounds and binomial estimates, checked
//!   against an exact log-space binomial tail.
//! - [`partition`]: greedy distance partitions of spheres and an
//!   independence audit.
//! - [`verify`]: invariant suites shared by the command-line harness.

pub mod bitset;
pub mod bounds;
pub mod engine;
pub mod fixtures;
pub mod graph;
mod numeric;
pub mod partition;
pub mod sampler;
pub mod verify;

pub use bitset::VertexSet;
pub use engine::{InfectionState, ThresholdSchedule, Trace};
pub use graph::{Graph, GraphSpec, VertexId};
