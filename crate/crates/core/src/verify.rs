//! Invariant suites shared by the `verify` subcommand and the test
//! harness. Each suite reports, per invariant, how many instances it
//! checked and how many failed.

use std::fmt;
use std::str::FromStr;

use rayon::prelude::*;

use crate::bitset::VertexSet;
use crate::bounds::{
    binomial_cdf, binomial_median_bracket, central_binomial, central_binomial_lower,
    chernoff_upper, exact_binomial_tail, reverse_chernoff_exact, reverse_chernoff_lower,
    small_p_tail_upper, weighted_tail_upper, Side, WeightedBinomialSpec,
};
use crate::engine::{dominance_check, reference, step, InfectionState, Simulator, ThresholdSchedule};
use crate::fixtures;
use crate::graph::{Graph, ProfileMode, SphereNeighborProfile, VertexId};
use crate::partition::{
    general_sphere_partition, greedy_distance_partition, hypercube_sphere_partition, verify_partition,
};
use crate::sampler::{count_successes, sample_initial};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Suite {
    EngineOracle,
    Dominance,
    Partitions,
    Bounds,
    Profiles,
    Coupling,
}

impl Suite {
    pub const ALL: [Suite; 6] = [
        Suite::EngineOracle,
        Suite::Dominance,
        Suite::Partitions,
        Suite::Bounds,
        Suite::Profiles,
        Suite::Coupling,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::EngineOracle => "engine-oracle",
            Suite::Dominance => "dominance",
            Suite::Partitions => "partitions",
            Suite::Bounds => "bounds",
            Suite::Profiles => "profiles",
            Suite::Coupling => "coupling",
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Suite {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        Suite::ALL
            .into_iter()
            .find(|suite| suite.name() == s)
            .ok_or_else(|| format!("unknown suite `{s}`"))
    }
}

/// Sizes and seeds for the randomised suites.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VerifyConfig {
    pub seed: u64,
    pub dominance_dim: u32,
    pub dominance_trials: u64,
    pub dominance_p: f64,
    pub scan_dim: u32,
    pub scan_trials: u64,
    pub mc_samples: u64,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 2009,
            dominance_dim: 14,
            dominance_trials: 1000,
            dominance_p: 0.35,
            scan_dim: 10,
            scan_trials: 500,
            mc_samples: 1_000_000,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Check {
    pub invariant: String,
    pub instances: u64,
    pub failures: u64,
    /// First failure, if any.
    pub example: Option<String>,
}

impl Check {
    pub fn passed(&self) -> bool {
        self.failures == 0 && self.instances > 0
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SuiteReport {
    pub suite: Suite,
    pub checks: Vec<Check>,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.checks.iter().all(Check::passed)
    }
}

/// Accumulates instance and failure counts for one invariant.
struct Tally {
    check: Check,
}

impl Tally {
    fn new(invariant: impl Into<String>) -> Self {
        Self {
            check: Check {
                invariant: invariant.into(),
                instances: 0,
                failures: 0,
                example: None,
            },
        }
    }

    fn record(&mut self, ok: bool, describe: impl FnOnce() -> String) {
        self.check.instances += 1;
        if !ok {
            self.check.failures += 1;
            if self.check.example.is_none() {
                self.check.example = Some(describe());
            }
        }
    }

    fn merge(mut self, other: Tally) -> Self {
        self.check.instances += other.check.instances;
        self.check.failures += other.check.failures;
        self.check.example = self.check.example.or(other.check.example);
        self
    }

    fn done(self) -> Check {
        self.check
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteReport {
    let checks = match suite {
        Suite::EngineOracle => engine_oracle(),
        Suite::Dominance => dominance(cfg),
        Suite::Partitions => partitions(),
        Suite::Bounds => bound_sandwich(30, cfg),
        Suite::Profiles => profiles(),
        Suite::Coupling => coupling(cfg),
    };
    SuiteReport { suite, checks }
}

/// Small graphs compared exhaustively against the reference engine:
/// `Q_2`, `Q_3` and the 12-vertex cubic fixtures.
pub fn oracle_graphs() -> Vec<(String, Graph)> {
    let mut graphs = vec![
        ("hypercube:2".to_string(), Graph::hypercube(2).unwrap()),
        ("hypercube:3".to_string(), Graph::hypercube(3).unwrap()),
    ];
    graphs.extend(
        fixtures::cubic_twelve()
            .into_iter()
            .map(|(name, g)| (name.to_string(), g)),
    );
    graphs
}

/// `majority`, `constant:1` and `bootk:majority,2,1` for a graph.
pub fn oracle_schedules(g: &Graph) -> [ThresholdSchedule; 3] {
    let r = crate::engine::majority_threshold(g.degree());
    [
        ThresholdSchedule::constant(r),
        ThresholdSchedule::constant(1),
        ThresholdSchedule::bootk(r, 2, 1),
    ]
}

fn engine_oracle() -> Vec<Check> {
    let mut runs = Tally::new("fast engine trace equals reference trace, every subset");
    let mut steps = Tally::new("synchronous step equals two-buffer reference step");
    for (name, g) in oracle_graphs() {
        let n = g.order();
        let adj = reference::adjacency_lists(&g);
        for sched in oracle_schedules(&g) {
            let (r, s) = (0..1u32 << n)
                .into_par_iter()
                .fold(
                    || (Tally::new(""), Tally::new(""), Simulator::new(&g)),
                    |(mut r, mut s, mut sim), mask| {
                        let members: Vec<VertexId> = (0..n as VertexId).filter(|v| mask >> v & 1 == 1).collect();
                        let set = VertexSet::from_indices(n, members.iter().copied());
                        let fast = sim.run(&set, &sched, Default::default());
                        let slow = reference::run(&g, &members, &sched);
                        let same = fast.as_ref().is_ok_and(|t| {
                            t.counts == slow.counts
                                && t.rounds_to_fixpoint == slow.rounds_to_fixpoint
                                && t.percolated == slow.percolated
                                && t.final_set.to_vec() == slow.final_set
                        });
                        r.record(same, || format!("{name} {sched} A0={members:?}"));
                        let next = step(&g, &InfectionState::initial(set), &sched);
                        let expect = reference::step(&adj, &members, sched.threshold_at(0));
                        s.record(next.infected.to_vec() == expect, || format!("{name} {sched} A0={members:?}"));
                        (r, s, sim)
                    },
                )
                .map(|(r, s, _)| (r, s))
                .reduce(|| (Tally::new(""), Tally::new("")), |a, b| (a.0.merge(b.0), a.1.merge(b.1)));
            runs = runs.merge(r);
            steps = steps.merge(s);
        }
    }
    vec![runs.done(), steps.done()]
}

/// `Boot ⊆ Boot1(1) ⊆ Boot3(1) ⊆ Bootk(r,5,1)` on `Q_dim`.
pub fn dominance_chain(dim: u32) -> [ThresholdSchedule; 4] {
    let r = crate::engine::majority_threshold(dim as usize);
    [
        ThresholdSchedule::constant(r),
        ThresholdSchedule::bootk(r, 1, 1),
        ThresholdSchedule::bootk(r, 3, 1),
        ThresholdSchedule::bootk(r, 5, 1),
    ]
}

fn dominance(cfg: &VerifyConfig) -> Vec<Check> {
    let g = Graph::hypercube(cfg.dominance_dim).expect("valid dimension");
    let chain = dominance_chain(cfg.dominance_dim);
    let mut out = Vec::new();
    for pair in chain.windows(2) {
        let (strict, generous) = (pair[0], pair[1]);
        let tally = (0..cfg.dominance_trials)
            .into_par_iter()
            .fold(
                || Tally::new(""),
                |mut t, trial| {
                    let a0 = sample_initial(&g, cfg.dominance_p, cfg.seed, trial);
                    let ok = dominance_check(&g, &a0, &strict, &generous).unwrap_or(false);
                    t.record(ok, || format!("trial {trial}"));
                    t
                },
            )
            .reduce(|| Tally::new(""), Tally::merge);
        let mut check = tally.done();
        check.invariant = format!(
            "Q_{} p={}: {strict} rounds contained in {generous} rounds",
            cfg.dominance_dim, cfg.dominance_p
        );
        out.push(check);
    }
    out
}

fn partitions() -> Vec<Check> {
    let mut hyper = Tally::new("hypercube sphere partition: count <= k C(n,k-1), distance >= 2k, n <= 10, k <= 4");
    for n in 1..=10u32 {
        let q = Graph::hypercube(n).unwrap();
        for k in 1..=n.min(4) {
            for x in [0, (1 << n) - 1, 0b1011 & ((1 << n) - 1)] {
                let part = hypercube_sphere_partition(n, x, k).unwrap();
                let sphere = q.sphere(x, k).unwrap();
                let verdict = verify_partition(&q, &sphere, &part);
                hyper.record(verdict.ok() && part.min_distance == 2 * k, || format!("n={n} k={k} x={x}: {verdict:?}"));
            }
        }
    }

    let mut general = Tally::new("general sphere partition: count <= d(f_(k-1)+f_k)+1, distance >= 3");
    let cases = [("torus:5^3", 2u32), ("hypercube:6", 2), ("torus:4^2", 2)];
    for (spec, kmax) in cases {
        let g = Graph::from_spec(spec).unwrap();
        let prof = SphereNeighborProfile::compute(&g, kmax, ProfileMode::Exhaustive).unwrap();
        for k in 1..=kmax {
            for x in [0, g.order() as VertexId / 2, g.order() as VertexId - 1] {
                let ok = general_sphere_partition(&g, x, k, &prof).map(|part| {
                    verify_partition(&g, &g.sphere(x, k).unwrap(), &part).ok() && part.min_distance == 3
                });
                general.record(ok == Ok(true), || format!("{spec} x={x} k={k}: {ok:?}"));
            }
        }
    }

    let mut greedy = Tally::new("greedy distance partition: <= m classes at distance >= k+1");
    for spec in ["torus:5^1", "torus:7^2", "hypercube:5", "torus:3^3"] {
        let g = Graph::from_spec(spec).unwrap();
        let all: Vec<VertexId> = (0..g.order() as VertexId).collect();
        for k in 0..=3u32 {
            let m = g.ball(0, k).unwrap().len();
            let ok = greedy_distance_partition(&g, &all, k, m).map(|part| verify_partition(&g, &all, &part).ok());
            greedy.record(ok == Ok(true), || format!("{spec} k={k}: {ok:?}"));
        }
    }
    for (name, g) in fixtures::cubic_twelve() {
        let all: Vec<VertexId> = (0..12).collect();
        for k in 0..=2u32 {
            let m = (0..12).map(|x| g.ball(x, k).unwrap().len()).max().unwrap();
            let ok = greedy_distance_partition(&g, &all, k, m).map(|part| verify_partition(&g, &all, &part).ok());
            greedy.record(ok == Ok(true), || format!("{name} k={k}: {ok:?}"));
        }
    }
    vec![hyper.done(), general.done(), greedy.done()]
}

/// Layer sizes used for the weighted-tail checks (`k ≤ 3`).
pub const LAYER_GRID: &[&[u64]] = &[
    &[10],
    &[30],
    &[10, 10],
    &[6, 15],
    &[20, 5],
    &[4, 6, 4],
    &[10, 10, 10],
    &[3, 12, 8],
];

/// Bound-versus-oracle checks. The Chernoff, reverse Chernoff and small-p
/// grids run over `n` in `10..=n_max`; the other checks use fixed grids.
pub fn bound_sandwich(n_max: u64, cfg: &VerifyConfig) -> Vec<Check> {
    let mut upper = Tally::new(format!("exact tail <= chernoff_upper, both sides, n in 10..={n_max}"));
    let mut lower = Tally::new(format!("reverse_chernoff_lower <= exact tail, n in 10..={n_max}"));
    let mut small = Tally::new("exact tail <= small_p_tail_upper when p n^2 <= 1");
    let mut regime_seen = 0u64;
    for n in 10..=n_max {
        let nf = n as f64;
        for p in [0.3, 0.4, 0.5] {
            let mean = nf * p;
            for t in (0..=2 * n).map(|i| i as f64 * 0.5) {
                let b = chernoff_upper(n, p, t, Side::Upper);
                let m = (mean + t - 1e-9).ceil() as u64;
                let exact = exact_binomial_tail(n, p, m).unwrap();
                upper.record(b.holds_for(exact), || format!("upper n={n} p={p} t={t}"));
                let b = chernoff_upper(n, p, t, Side::Lower);
                let below = mean - t + 1e-9;
                let exact = if below < 0.0 { 0.0 } else { binomial_cdf(n, p, below.floor() as u64).unwrap() };
                upper.record(b.holds_for(exact), || format!("lower n={n} p={p} t={t}"));
            }
            let delta = 0.5 - p;
            let c_max = 0.5 * (nf / nf.ln()).sqrt();
            for c in [0.0, 0.25 * c_max, 0.5 * c_max, c_max] {
                let b = reverse_chernoff_lower(n, delta, c, 10);
                regime_seen += u64::from(b.preconditions_met());
                let exact = reverse_chernoff_exact(n, delta, c).unwrap();
                lower.record(b.holds_for(exact), || format!("n={n} delta={delta} C={c}: bound {} exact {exact}", b.value));
            }
        }
        for p in [1.0 / (nf * nf), 0.5 / (nf * nf), 1e-4, 1e-6] {
            for m in 1..=n {
                let b = small_p_tail_upper(n, p, m);
                let exact = exact_binomial_tail(n, p, m).unwrap();
                small.record(b.preconditions_met() && b.holds_for(exact), || format!("n={n} p={p} m={m}"));
            }
        }
    }
    // the δ-grid must actually exercise the regime
    lower.record(regime_seen > 0, || "no grid point met the preconditions".into());

    let mut layered = Tally::new(format!(
        "weighted tail <= layer bound: exact convolution, and MC ({} samples) minus 3 sigma",
        cfg.mc_samples
    ));
    let cases: Vec<(usize, f64, u64)> = LAYER_GRID
        .iter()
        .enumerate()
        .flat_map(|(i, _)| [0.3, 0.5].into_iter().flat_map(move |p| [1u64, 2, 4, 7].map(|t| (i, p, t))))
        .collect();
    let results: Vec<(bool, String)> = cases
        .par_iter()
        .map(|&(i, p, t)| {
            let spec = WeightedBinomialSpec::new(LAYER_GRID[i].to_vec(), p);
            let b = weighted_tail_upper(&spec, t);
            let exact = spec.exact_tail(t as f64);
            let seed = cfg.seed ^ ((i as u64) << 32) ^ (t << 8) ^ (p * 10.0) as u64;
            let (mc, se) = spec.sample_tail(t as f64, cfg.mc_samples, seed);
            let ok = b.preconditions_met() && b.holds_for(exact) && b.holds_for(mc - 3.0 * se);
            (ok, format!("d={:?} p={p} t={t}: bound {} exact {exact} mc {mc}", LAYER_GRID[i], b.value))
        })
        .collect();
    for (ok, msg) in results {
        layered.record(ok, || msg);
    }

    let mut central = Tally::new("central_binomial_lower <= C(n, n/2+m) on 8m <= n, 4m^3 <= n^2");
    for n in (8..=400u64).step_by(2) {
        for m in 0..=n / 8 {
            let b = central_binomial_lower(n, m);
            if b.preconditions_met() {
                central.record(b.holds_for(central_binomial(n, m)), || format!("n={n} m={m}"));
            }
        }
    }

    let mut median = Tally::new("P(S <= floor(np)-1) <= 1/2 <= P(S <= ceil(np)), n <= 200");
    for n in 1..=200u64 {
        for p in (1..=9).map(|i| i as f64 / 10.0) {
            let (a, b) = binomial_median_bracket(n, p).unwrap();
            median.record(a <= 0.5 && 0.5 <= b, || format!("n={n} p={p}: {a} {b}"));
        }
    }

    let mut complement = Tally::new("P(>= m) + P(<= m-1) = 1 within 1e-12, monotone in m");
    for n in [10u64, 100, 1000, 10_000] {
        for p in [0.05, 0.3, 0.5, 0.77] {
            let mut prev = f64::INFINITY;
            for m in (0..=n).step_by((n as usize / 50).max(1)) {
                let up = exact_binomial_tail(n, p, m).unwrap();
                let down = if m == 0 { 0.0 } else { binomial_cdf(n, p, m - 1).unwrap() };
                complement.record((up + down - 1.0).abs() <= 1e-12 && up <= prev, || format!("n={n} p={p} m={m}"));
                prev = up;
            }
        }
    }
    vec![
        upper.done(),
        lower.done(),
        small.done(),
        layered.done(),
        central.done(),
        median.done(),
        complement.done(),
    ]
}

fn profiles() -> Vec<Check> {
    let mut torus = Tally::new("torus:5^3 exhaustive profile: f_m <= m+1, m <= 3");
    let g = Graph::torus(5, 3).unwrap();
    let prof = SphereNeighborProfile::compute(&g, 3, ProfileMode::Exhaustive).unwrap();
    for m in 1..=3 {
        let f = prof.f(m).unwrap();
        torus.record(f <= m + 1, || format!("f_{m} = {f}"));
    }
    let mut cube = Tally::new("hypercube:8 exhaustive profile: f_m = m+1, m <= 3");
    let g = Graph::hypercube(8).unwrap();
    let prof = SphereNeighborProfile::compute(&g, 3, ProfileMode::Exhaustive).unwrap();
    for m in 1..=3 {
        let f = prof.f(m).unwrap();
        cube.record(f == m + 1, || format!("f_{m} = {f}"));
    }
    let mut hamming = Tally::new("hypercube BFS distance equals Hamming distance, n <= 10");
    for n in 1..=10u32 {
        let g = Graph::hypercube(n).unwrap();
        for x in 0..g.order() as VertexId {
            let d = g.distances_from(x);
            let ok = d.iter().enumerate().all(|(y, &dy)| dy == Some((x ^ y as u32).count_ones()));
            hamming.record(ok, || format!("n={n} x={x}"));
        }
    }
    let mut cyclic = Tally::new("torus BFS distance equals cyclic L1 distance, n <= 5, d <= 3");
    for side in 2..=5u32 {
        for dim in 1..=3u32 {
            let g = Graph::torus(side, dim).unwrap();
            let coords = |v: u32| (0..dim).map(move |i| v / side.pow(i) % side);
            for x in 0..g.order() as VertexId {
                let d = g.distances_from(x);
                let ok = d.iter().enumerate().all(|(y, &dy)| {
                    let l1: u32 = coords(x)
                        .zip(coords(y as u32))
                        .map(|(a, b)| a.abs_diff(b).min(side - a.abs_diff(b)))
                        .sum();
                    dy == Some(l1)
                });
                cyclic.record(ok, || format!("torus:{side}^{dim} x={x}"));
            }
        }
    }
    vec![torus.done(), cube.done(), hamming.done(), cyclic.done()]
}

/// `lo, lo+step, …, hi` with the endpoints snapped to avoid drift.
pub fn p_grid(lo: f64, hi: f64, step: f64) -> Vec<f64> {
    let count = ((hi - lo) / step + 1e-9).floor() as usize;
    (0..=count)
        .map(|i| {
            let p = lo + i as f64 * step;
            // print-stable: round to 12 decimals
            (p * 1e12).round() / 1e12
        })
        .collect()
}

fn coupling(cfg: &VerifyConfig) -> Vec<Check> {
    let g = Graph::hypercube(cfg.scan_dim).unwrap();
    let sched = ThresholdSchedule::majority(g.degree());
    let mut scan = Tally::new(format!(
        "Q_{} majority scan 0.1:0.5:0.02, {} coupled trials: successes nondecreasing in p",
        cfg.scan_dim, cfg.scan_trials
    ));
    let counts: Vec<u64> = p_grid(0.1, 0.5, 0.02)
        .into_iter()
        .map(|p| count_successes(&g, &sched, p, cfg.seed, 0..cfg.scan_trials).unwrap())
        .collect();
    for w in counts.windows(2) {
        scan.record(w[0] <= w[1], || format!("counts {counts:?}"));
    }
    let mut nested = Tally::new("sample_initial nested in p for fixed (seed, trial)");
    for trial in 0..200 {
        let sets: Vec<VertexSet> = [0.0, 0.1, 0.35, 0.5, 0.9, 1.0]
            .iter()
            .map(|&p| sample_initial(&g, p, cfg.seed, trial))
            .collect();
        let ok = sets.windows(2).all(|w| w[0].is_subset(&w[1])) && sets[0].is_empty() && sets[5].is_full();
        nested.record(ok, || format!("trial {trial}"));
    }
    let mut steps = Tally::new("each coupled trial percolates on an up-set of the p grid");
    let grid = p_grid(0.1, 0.5, 0.02);
    let mut sim = Simulator::new(&g);
    for trial in 0..cfg.scan_trials.min(200) {
        let outcomes: Vec<bool> = grid
            .iter()
            .map(|&p| sim.percolates(&sample_initial(&g, p, cfg.seed, trial), &sched).unwrap())
            .collect();
        let jumps = outcomes.windows(2).filter(|w| w[0] && !w[1]).count();
        steps.record(jumps == 0, || format!("trial {trial}: {outcomes:?}"));
    }
    vec![scan.done(), nested.done(), steps.done()]
}
