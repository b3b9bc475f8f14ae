use bootperc::engine::{reference, run_to_fixpoint, RunOptions, Simulator, ThresholdSchedule};
use bootperc::graph::{parse_adjacency, random_regular, Graph, VertexId};
use bootperc::VertexSet;
use proptest::prelude::*;

fn graph_strategy() -> impl Strategy<Value = Graph> {
    prop_oneof![
        (2u32..=9).prop_map(|n| Graph::hypercube(n).unwrap()),
        (3u32..=6, 1u32..=3).prop_map(|(s, d)| Graph::torus(s, d).unwrap()),
        (3usize..=4, any::<u64>()).prop_map(|(d, seed)| random_regular(24, d, seed).unwrap()),
    ]
}

fn schedule_strategy(degree: usize) -> impl Strategy<Value = ThresholdSchedule> {
    let d = degree as u32;
    prop_oneof![
        (1..=d).prop_map(ThresholdSchedule::constant),
        (1..=d, 1u32..=4, 0u32..=2).prop_map(|(r, k, t)| ThresholdSchedule::bootk(r, k, t)),
    ]
}

/// A graph, a schedule, and two nested random initial sets.
fn instance() -> impl Strategy<Value = (Graph, ThresholdSchedule, VertexSet, VertexSet)> {
    graph_strategy().prop_flat_map(|g| {
        let n = g.order();
        let sched = schedule_strategy(g.degree());
        let small = proptest::collection::vec(0.0f64..1.0, n);
        (Just(g), sched, small, 0.0f64..0.6, 0.0f64..0.4).prop_map(|(g, s, u, p, extra)| {
            let n = g.order();
            let a = VertexSet::from_indices(n, (0..n as VertexId).filter(|&v| u[v as usize] < p));
            let b = VertexSet::from_indices(n, (0..n as VertexId).filter(|&v| u[v as usize] < p + extra));
            (g, s, a, b)
        })
    })
}

proptest! {
    #![proptest_config(ProptestConfig {
        cases: 200,
        failure_persistence: None,
        ..ProptestConfig::default()
    })]

    #[test]
    fn larger_initial_set_grows_larger((g, sched, a, b) in instance()) {
        prop_assert!(a.is_subset(&b));
        let fa = run_to_fixpoint(&g, &a, &sched, None).unwrap();
        let fb = run_to_fixpoint(&g, &b, &sched, None).unwrap();
        prop_assert!(fa.final_set.is_subset(&fb.final_set));
    }

    #[test]
    fn lower_threshold_grows_larger((g, sched, a, _b) in instance(), drop in 1u32..=3) {
        let r = sched.base();
        let easier = ThresholdSchedule::constant(r.saturating_sub(drop).max(1));
        let strict = ThresholdSchedule::constant(r);
        let fs = run_to_fixpoint(&g, &a, &strict, None).unwrap();
        let fe = run_to_fixpoint(&g, &a, &easier, None).unwrap();
        prop_assert!(fs.final_set.is_subset(&fe.final_set));
    }

    #[test]
    fn fixpoint_is_idempotent((g, sched, a, _b) in instance()) {
        let first = run_to_fixpoint(&g, &a, &sched, None).unwrap();
        let settled = ThresholdSchedule::constant(sched.base());
        let again = run_to_fixpoint(&g, &first.final_set, &settled, None).unwrap();
        prop_assert_eq!(&again.final_set, &first.final_set);
        prop_assert_eq!(again.rounds_to_fixpoint, 0);
    }

    #[test]
    fn trace_shape((g, sched, a, _b) in instance()) {
        let t = run_to_fixpoint(&g, &a, &sched, None).unwrap();
        prop_assert_eq!(t.counts.len(), t.rounds_to_fixpoint + 1);
        prop_assert!(t.counts.windows(2).all(|w| w[0] < w[1]));
        prop_assert_eq!(*t.counts.last().unwrap(), t.final_set.count());
        prop_assert_eq!(t.percolated, t.final_set.count() == g.order());
        prop_assert!(a.is_subset(&t.final_set));
    }

    #[test]
    fn fast_engine_matches_reference((g, sched, a, _b) in instance()) {
        let fast = run_to_fixpoint(&g, &a, &sched, None).unwrap();
        let slow = reference::run(&g, &a.to_vec(), &sched);
        prop_assert_eq!(&fast.counts, &slow.counts);
        prop_assert_eq!(fast.final_set.to_vec(), slow.final_set);
    }

    #[test]
    fn retained_rounds_reproduce_each_set((g, sched, a, _b) in instance()) {
        let mut sim = Simulator::new(&g);
        let t = sim.run(&a, &sched, RunOptions { max_rounds: None, retain_rounds: true }).unwrap();
        let rounds = t.infection_round.as_ref().unwrap();
        for m in 0..=t.rounds_to_fixpoint {
            let set = t.set_at_round(m).unwrap();
            prop_assert_eq!(set.count(), t.counts[m]);
            prop_assert!(set.iter().all(|v| rounds[v as usize] as usize <= m));
        }
    }
}

/// A hypercube loaded from its adjacency text takes the generic kernel, so
/// comparing it with the bit-sliced hypercube checks one against the other.
#[test]
fn bitslice_and_frontier_kernels_agree() {
    for dim in [4u32, 7, 9] {
        let cube = Graph::hypercube(dim).unwrap();
        let explicit = parse_adjacency(&cube.to_adjacency_string()).unwrap();
        assert_eq!(explicit.hypercube_dim(), None);
        let n = cube.order();
        let r = bootperc::engine::majority_threshold(dim as usize);
        for sched in [
            ThresholdSchedule::constant(r),
            ThresholdSchedule::constant(1),
            ThresholdSchedule::bootk(r, 3, 1),
        ] {
            for trial in 0..60 {
                let p = 0.05 + 0.01 * trial as f64;
                let a0 = bootperc::sampler::sample_initial(&cube, p, 99, trial);
                let x = run_to_fixpoint(&cube, &a0, &sched, None).unwrap();
                let y = run_to_fixpoint(&explicit, &a0, &sched, None).unwrap();
                assert_eq!(x.counts, y.counts, "dim {dim} {sched} trial {trial}");
                assert_eq!(x.final_set, y.final_set);
                assert_eq!(x.final_set.universe(), n);
            }
        }
    }
}

#[test]
fn exhaustive_monotonicity_on_small_cubes() {
    for dim in [2u32, 3] {
        let g = Graph::hypercube(dim).unwrap();
        let n = g.order();
        for r in 1..=dim {
            let sched = ThresholdSchedule::constant(r);
            let finals: Vec<u32> = (0..1u32 << n)
                .map(|mask| {
                    let a = VertexSet::from_indices(n, (0..n as u32).filter(|v| mask >> v & 1 == 1));
                    let f = run_to_fixpoint(&g, &a, &sched, None).unwrap().final_set;
                    f.iter().fold(0, |m, v| m | 1 << v)
                })
                .collect();
            for a in 0..1u32 << n {
                for b in 0..1u32 << n {
                    if a & !b == 0 {
                        assert_eq!(finals[a as usize] & !finals[b as usize], 0, "Q_{dim} r={r}");
                    }
                }
            }
        }
    }
}
