//! Subcommand bodies.

use std::path::Path;

use bootperc::bounds::{
    binomial_cdf, central_binomial, central_binomial_lower, chernoff_upper, dreg_condition_check,
    exact_binomial_tail, reverse_chernoff_exact, reverse_chernoff_lower, small_p_tail_upper,
    majority_window_bounds, weighted_tail_upper, BoundResult, Direction, Side, WeightedBinomialSpec,
};
use bootperc::engine::{RunOptions, Simulator};
use bootperc::graph::{GraphSpec, ProfileMode, SphereNeighborProfile};
use bootperc::partition::{
    general_sphere_partition, greedy_distance_partition, hypercube_sphere_partition,
    independence_audit, verify_partition,
};
use bootperc::sampler::coupling::{mix64, sample_initial};
use bootperc::sampler::{
    estimate_pc, estimate_percolation_prob, estimate_window, BisectionConfig, CriticalEstimate,
    Termination, TrialPlan,
};
use bootperc::verify::{bound_sandwich, p_grid, run_suite, Suite, VerifyConfig};
use bootperc::{Graph, ThresholdSchedule, VertexId, VertexSet};

use crate::output::{flag, join, num, Table};
use crate::{
    AuditArgs, Bisection, BoundsArgs, Failure, Global, Model, PartitionArgs, PartitionKind, PcArgs,
    ProfileArgs, ProfileModeArg, ScanArgs, TailSide, TraceArgs, VerifyArgs, WindowArgs,
};

/// Per-point seed offset for uncoupled scans.
const SCAN_STRIDE: u64 = 0x9E37_79B9_7F4A_7C15;

struct Loaded {
    graph: Graph,
    name: String,
    sched: ThresholdSchedule,
}

fn load_graph(spec: &str) -> Result<(Graph, String), Failure> {
    let spec: GraphSpec = spec.parse()?;
    Ok((spec.build()?, spec.to_string()))
}

fn load(model: &Model) -> Result<Loaded, Failure> {
    let (graph, name) = load_graph(&model.graph)?;
    let sched = ThresholdSchedule::parse(&model.rule, graph.degree())?;
    Ok(Loaded { graph, name, sched })
}

fn table(g: &Global, header: &[&str]) -> Result<Table, Failure> {
    Table::create(g.output.as_deref(), g.timestamp, header)
}

fn parse_grid(s: &str) -> Result<Vec<f64>, Failure> {
    let bad = || Failure::usage(format!("p-grid `{s}`: expected lo:hi:step or a single p"));
    let parts: Vec<f64> = s
        .split(':')
        .map(|x| x.trim().parse::<f64>())
        .collect::<Result<_, _>>()
        .map_err(|_| bad())?;
    let grid = match parts[..] {
        [p] => vec![p],
        [lo, hi, step] if step > 0.0 && lo <= hi => p_grid(lo, hi, step),
        _ => return Err(bad()),
    };
    if grid.iter().any(|p| !(0.0..=1.0).contains(p)) {
        return Err(Failure::usage(format!("p-grid `{s}` leaves [0, 1]")));
    }
    Ok(grid)
}

fn vertices(g: &Graph, ids: &[u64]) -> Result<Vec<VertexId>, Failure> {
    ids.iter()
        .map(|&v| g.check_vertex(v).map_err(Failure::from))
        .collect()
}

pub fn scan(g: &Global, a: &ScanArgs) -> Result<(), Failure> {
    let m = load(&a.model)?;
    let grid = parse_grid(&a.p_grid)?;
    let mut out = table(
        g,
        &["graph", "rule", "p", "trials", "successes", "p_hat", "ci_lo", "ci_hi", "seed"],
    )?;
    for (i, &p) in grid.iter().enumerate() {
        let seed = if a.coupled {
            g.seed
        } else {
            mix64(g.seed ^ (i as u64 + 1).wrapping_mul(SCAN_STRIDE))
        };
        let plan = TrialPlan {
            p,
            trials: a.trials,
            master_seed: seed,
            schedule: m.sched,
        };
        let e = estimate_percolation_prob(&m.graph, &plan)?;
        out.row([
            m.name.clone(),
            m.sched.to_string(),
            num(p),
            e.trials.to_string(),
            e.successes.to_string(),
            num(e.p_hat),
            num(e.ci_lo),
            num(e.ci_hi),
            seed.to_string(),
        ])?;
    }
    out.finish()
}

fn bisection(g: &Global, b: &Bisection) -> BisectionConfig {
    BisectionConfig {
        base_trials: b.trials,
        tol: b.tol,
        master_seed: g.seed,
        max_doublings: b.max_doublings,
    }
}

fn termination(t: Termination) -> &'static str {
    match t {
        Termination::Converged => "converged",
        Termination::Undecided { .. } => "undecided",
        Termination::Degenerate => "degenerate",
    }
}

fn write_probes(path: &Path, g: &Global, runs: &[&CriticalEstimate]) -> Result<(), Failure> {
    let mut log = Table::create(
        Some(path),
        g.timestamp,
        &["level", "p", "trials", "successes", "p_hat", "ci_lo", "ci_hi", "seed"],
    )?;
    for run in runs {
        for probe in &run.probes {
            let e = &probe.estimate;
            log.row([
                num(run.level),
                num(probe.p),
                e.trials.to_string(),
                e.successes.to_string(),
                num(e.p_hat),
                num(e.ci_lo),
                num(e.ci_hi),
                probe.seed.to_string(),
            ])?;
        }
    }
    log.finish()
}

fn undecided(runs: &[&CriticalEstimate]) -> Result<(), Failure> {
    for run in runs {
        if let Termination::Undecided { p } = run.termination {
            return Err(Failure::budget(format!(
                "level {}: probe at p = {} still undecided at the trial cap; bracket [{}, {}]",
                num(run.level),
                num(p),
                num(run.p_lo),
                num(run.p_hi)
            )));
        }
    }
    Ok(())
}

pub fn pc(g: &Global, a: &PcArgs) -> Result<(), Failure> {
    let m = load(&a.model)?;
    let est = estimate_pc(&m.graph, &m.sched, &bisection(g, &a.bisection))?;
    let mut out = table(
        g,
        &["graph", "rule", "level", "pc_hat", "p_lo", "p_hi", "width", "termination", "probes", "seed"],
    )?;
    out.row([
        m.name,
        m.sched.to_string(),
        num(est.level),
        num(est.pc_hat),
        num(est.p_lo),
        num(est.p_hi),
        num(est.width()),
        termination(est.termination).to_string(),
        est.probes.len().to_string(),
        g.seed.to_string(),
    ])?;
    out.finish()?;
    if let Some(path) = &a.bisection.probe_log {
        write_probes(path, g, &[&est])?;
    }
    undecided(&[&est])
}

pub fn window(g: &Global, a: &WindowArgs) -> Result<(), Failure> {
    let m = load(&a.model)?;
    let w = estimate_window(&m.graph, &m.sched, a.alpha, &bisection(g, &a.bisection))?;
    let mut out = table(
        g,
        &[
            "graph", "rule", "alpha", "p_alpha", "p_alpha_lo", "p_alpha_hi", "p_upper", "p_upper_lo",
            "p_upper_hi", "width", "termination", "seed",
        ],
    )?;
    let term = if w.lower.converged() { w.upper.termination } else { w.lower.termination };
    out.row([
        m.name,
        m.sched.to_string(),
        num(w.alpha),
        num(w.lower.pc_hat),
        num(w.lower.p_lo),
        num(w.lower.p_hi),
        num(w.upper.pc_hat),
        num(w.upper.p_lo),
        num(w.upper.p_hi),
        num(w.width()),
        termination(term).to_string(),
        g.seed.to_string(),
    ])?;
    out.finish()?;
    if let Some(path) = &a.bisection.probe_log {
        write_probes(path, g, &[&w.lower, &w.upper])?;
    }
    undecided(&[&w.lower, &w.upper])
}

const BOUND_HEADER: [&str; 8] = [
    "bound_name",
    "params",
    "value",
    "direction",
    "preconds_ok",
    "reference",
    "reference_kind",
    "holds",
];

fn direction(d: Direction) -> &'static str {
    match d {
        Direction::Upper => "upper",
        Direction::Lower => "lower",
    }
}

fn bound_row(out: &mut Table, b: &BoundResult, params: String, reference: f64, kind: &str) -> Result<(), Failure> {
    out.row([
        b.name.to_string(),
        params,
        num(b.value),
        direction(b.direction).to_string(),
        flag(b.preconditions_met()).to_string(),
        num(reference),
        kind.to_string(),
        flag(b.holds_for(reference)).to_string(),
    ])
}

fn need<T: Copy>(v: Option<T>, name: &str) -> Result<T, Failure> {
    v.ok_or_else(|| Failure::usage(format!("this bound needs --{name}")))
}

fn need_n(a: &BoundsArgs) -> Result<&[u64], Failure> {
    if a.n.is_empty() {
        return Err(Failure::usage("this bound needs --n"));
    }
    Ok(&a.n)
}

pub fn bounds(g: &Global, a: &BoundsArgs) -> Result<(), Failure> {
    if a.sandwich {
        return sandwich(g, a);
    }
    let mut out = table(g, &BOUND_HEADER)?;
    if a.theorem1 {
        for &n in need_n(a)? {
            let t = majority_window_bounds(n, a.lambda_lo, a.lambda_hi)?;
            for (name, lambda, value, dir) in [
                ("majority_window_lower", a.lambda_lo, t.p_lower, "lower"),
                ("majority_window_upper", a.lambda_hi, t.p_upper, "upper"),
            ] {
                out.row([
                    name.to_string(),
                    format!("n={n};lambda={lambda}"),
                    num(value),
                    dir.to_string(),
                    "true".to_string(),
                    String::new(),
                    "none".to_string(),
                    String::new(),
                ])?;
            }
        }
    } else if a.layer4 {
        if a.d.is_empty() {
            return Err(Failure::usage("--layer4 needs --d d_1,...,d_k"));
        }
        let p = need(a.p, "p")?;
        let t = need(a.t, "t")?;
        if t < 1.0 || t.fract() != 0.0 {
            return Err(Failure::usage("--layer4 needs an integer --t >= 1"));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Failure::usage("--p must lie in [0, 1]"));
        }
        let spec = WeightedBinomialSpec::new(a.d.clone(), p);
        let b = weighted_tail_upper(&spec, t as u64);
        let params = format!(
            "d={};p={p};t={t};mean={};spread={}",
            join(&a.d, " "),
            num(spec.mean()),
            num(spec.spread())
        );
        let (mc, se) = spec.sample_tail(t, a.samples, g.seed);
        out.row([
            b.name.to_string(),
            params.clone(),
            num(b.value),
            direction(b.direction).to_string(),
            flag(b.preconditions_met()).to_string(),
            num(mc),
            format!("mc:{}:se={}", a.samples, num(se)),
            flag(b.holds_for(mc - 3.0 * se)).to_string(),
        ])?;
        bound_row(&mut out, &b, params, spec.exact_tail(t), "exact")?;
    } else if a.chernoff {
        let p = need(a.p, "p")?;
        let t = need(a.t, "t")?;
        if !(0.0..=1.0).contains(&p) || t < 0.0 {
            return Err(Failure::usage("--chernoff needs p in [0, 1] and t >= 0"));
        }
        for &n in need_n(a)? {
            let mean = n as f64 * p;
            let (b, exact) = match a.side {
                TailSide::Upper => {
                    let m = (mean + t - 1e-9).ceil().max(0.0) as u64;
                    let exact = if m > n { 0.0 } else { exact_binomial_tail(n, p, m)? };
                    (chernoff_upper(n, p, t, Side::Upper), exact)
                }
                TailSide::Lower => {
                    let below = mean - t + 1e-9;
                    let exact = if below < 0.0 { 0.0 } else { binomial_cdf(n, p, below.floor() as u64)? };
                    (chernoff_upper(n, p, t, Side::Lower), exact)
                }
            };
            bound_row(&mut out, &b, format!("n={n};p={p};t={t}"), exact, "exact")?;
        }
    } else if a.reverse_chernoff {
        let delta = need(a.delta, "delta")?;
        let c = need(a.c, "c")?;
        for &n in need_n(a)? {
            let b = reverse_chernoff_lower(n, delta, c, a.n_min);
            let exact = reverse_chernoff_exact(n, delta, c)?;
            let params = format!("n={n};delta={delta};c={c};n_min={}", a.n_min);
            bound_row(&mut out, &b, params, exact, "exact")?;
        }
    } else if a.small_p {
        let p = need(a.p, "p")?;
        let m = need(a.m, "m")?;
        for &n in need_n(a)? {
            let b = small_p_tail_upper(n, p, m);
            let exact = if m > n { 0.0 } else { exact_binomial_tail(n, p, m)? };
            bound_row(&mut out, &b, format!("n={n};p={p};m={m}"), exact, "exact")?;
        }
    } else if a.central {
        let m = need(a.m, "m")?;
        for &n in need_n(a)? {
            if n % 2 == 1 || m > n / 2 {
                return Err(Failure::usage(format!("--central needs even n and m <= n/2 (n={n}, m={m})")));
            }
            let b = central_binomial_lower(n, m);
            bound_row(&mut out, &b, format!("n={n};m={m}"), central_binomial(n, m), "exact")?;
        }
    } else if a.dreg {
        dreg(&mut out, a)?;
    }
    out.finish()
}

fn dreg(out: &mut Table, a: &BoundsArgs) -> Result<(), Failure> {
    let [d] = a.d[..] else {
        return Err(Failure::usage("--dreg needs a single --d"));
    };
    let k = need(a.k, "k")?;
    let ln_order = need(a.ln_order, "ln-order")?;
    let omega = need(a.omega, "omega")?;
    let profile = SphereNeighborProfile::from_values(a.f.clone());
    let c = dreg_condition_check(d, k, ln_order, &profile, omega)?;
    let params = format!("d={d};k={k};ln_n={ln_order};omega={omega};f={}", join(&a.f, " "));
    let kd = k as f64 * (d as f64).ln();
    for (name, value, reference, ok) in [
        ("dreg_size", c.exponent, c.ln_order, c.size_ok()),
        ("dreg_smallness", f64::from(c.f_max), d as f64 / kd, c.smallness_ok()),
    ] {
        out.row([
            name.to_string(),
            params.clone(),
            num(value),
            if name == "dreg_size" { "upper" } else { "lower" }.to_string(),
            "true".to_string(),
            num(reference),
            "formula".to_string(),
            flag(ok).to_string(),
        ])?;
    }
    Ok(())
}

fn sandwich(g: &Global, a: &BoundsArgs) -> Result<(), Failure> {
    if a.n_max < 10 {
        return Err(Failure::usage("--n-max must be at least 10"));
    }
    let cfg = VerifyConfig {
        seed: g.seed,
        mc_samples: a.samples,
        ..VerifyConfig::default()
    };
    let checks = bound_sandwich(a.n_max, &cfg);
    let mut out = table(g, &["invariant", "instances", "violations"])?;
    for c in &checks {
        out.row([c.invariant.clone(), c.instances.to_string(), c.failures.to_string()])?;
    }
    out.finish()?;
    match checks.iter().find(|c| !c.passed()) {
        Some(c) => Err(Failure::breach(format!(
            "{}: {}",
            c.invariant,
            c.example.as_deref().unwrap_or("no instances")
        ))),
        None => Ok(()),
    }
}

pub fn partition(g: &Global, a: &PartitionArgs) -> Result<(), Failure> {
    let (graph, _) = load_graph(&a.graph)?;
    let x = graph.check_vertex(a.x)?;
    let (input, part) = match a.kind {
        PartitionKind::Greedy => {
            let input = if a.vertices.is_empty() {
                (0..graph.order() as VertexId).collect()
            } else {
                vertices(&graph, &a.vertices)?
            };
            let budget = match a.m {
                Some(m) => m,
                None => input
                    .iter()
                    .map(|&v| graph.ball(v, a.k).map(|b| b.len()))
                    .try_fold(1, |acc, s| s.map(|s| acc.max(s)))?,
            };
            let part = greedy_distance_partition(&graph, &input, a.k, budget)?;
            (input, part)
        }
        PartitionKind::HypercubeSphere => {
            let n = graph
                .hypercube_dim()
                .ok_or_else(|| Failure::usage("hypercube-sphere needs a hypercube graph"))?;
            (graph.sphere(x, a.k)?, hypercube_sphere_partition(n, x, a.k)?)
        }
        PartitionKind::GeneralSphere => {
            let profile = if a.profile.is_empty() {
                SphereNeighborProfile::compute(&graph, a.k, ProfileMode::Exhaustive)?
            } else {
                SphereNeighborProfile::from_values(a.profile.clone())
            };
            (graph.sphere(x, a.k)?, general_sphere_partition(&graph, x, a.k, &profile)?)
        }
    };
    let verdict = verify_partition(&graph, &input, &part);
    let mut header = vec!["class", "size"];
    if a.emit_classes {
        header.push("members");
    }
    let mut out = table(g, &header)?;
    for (i, class) in part.classes.iter().enumerate() {
        let mut row = vec![i.to_string(), class.len().to_string()];
        if a.emit_classes {
            row.push(join(class, " "));
        }
        out.row(row)?;
    }
    out.finish()?;
    eprintln!(
        "verdict: classes={} bound={} min_distance={} disjoint={} covers={} distance_ok={} count_ok={} pairs_checked={}",
        part.len(),
        part.class_bound,
        part.min_distance,
        verdict.disjoint,
        verdict.covers,
        verdict.distance_ok,
        verdict.count_ok,
        verdict.pairs_checked
    );
    if verdict.ok() {
        Ok(())
    } else {
        Err(Failure::breach("partition failed verification"))
    }
}

pub fn audit(g: &Global, a: &AuditArgs) -> Result<(), Failure> {
    let m = load(&a.model)?;
    let class = vertices(&m.graph, &a.class)?;
    let r = independence_audit(&m.graph, &class, a.round, &m.sched, a.p, a.trials, g.seed)?;
    let mut out = table(
        g,
        &[
            "round", "r_dep", "structural_ok", "trials", "pairs", "pairs_below_threshold",
            "max_abs_correlation", "threshold", "statistical_ok", "marginals",
        ],
    )?;
    out.row([
        r.round.to_string(),
        r.r_dep.to_string(),
        flag(r.structural_ok).to_string(),
        r.trials.to_string(),
        r.pairs.to_string(),
        r.pairs_below_threshold.to_string(),
        num(r.max_abs_correlation),
        num(r.threshold),
        flag(r.statistical_ok()).to_string(),
        r.marginals.iter().map(|&x| num(x)).collect::<Vec<_>>().join(" "),
    ])?;
    out.finish()
}

pub fn verify(g: &Global, a: &VerifyArgs) -> Result<(), Failure> {
    let suites: Vec<Suite> = if a.suite == "all" {
        Suite::ALL.to_vec()
    } else {
        vec![a.suite.parse().map_err(Failure::usage)?]
    };
    let cfg = VerifyConfig {
        seed: g.seed,
        ..VerifyConfig::default()
    };
    let mut out = table(g, &["suite", "invariant", "instances", "failures", "status", "example"])?;
    let mut failed = Vec::new();
    for suite in suites {
        let report = run_suite(suite, &cfg);
        for c in &report.checks {
            out.row([
                suite.to_string(),
                c.invariant.clone(),
                c.instances.to_string(),
                c.failures.to_string(),
                if c.passed() { "pass" } else { "fail" }.to_string(),
                c.example.clone().unwrap_or_default(),
            ])?;
        }
        if !report.passed() {
            failed.push(suite.name());
        }
    }
    out.finish()?;
    if failed.is_empty() {
        Ok(())
    } else {
        Err(Failure::breach(format!("failed suites: {}", failed.join(", "))))
    }
}

pub fn profile(g: &Global, a: &ProfileArgs) -> Result<(), Failure> {
    let (graph, _) = load_graph(&a.graph)?;
    let mode = match a.mode {
        ProfileModeArg::Exhaustive => ProfileMode::Exhaustive,
        ProfileModeArg::Sampled => ProfileMode::Sampled {
            samples: a.samples,
            seed: g.seed,
        },
    };
    let prof = SphereNeighborProfile::compute(&graph, a.k, mode)?;
    let mut out = table(g, &["i", "f_i", "exact"])?;
    for i in 1..=prof.max_radius() {
        out.row([
            i.to_string(),
            prof.f(i).unwrap_or_default().to_string(),
            flag(prof.is_exact()).to_string(),
        ])?;
    }
    out.finish()
}

pub fn trace(g: &Global, a: &TraceArgs) -> Result<(), Failure> {
    let m = load(&a.model)?;
    let initial = match a.p {
        Some(p) if (0.0..=1.0).contains(&p) => sample_initial(&m.graph, p, g.seed, a.trial),
        Some(p) => return Err(Failure::usage(format!("p = {p} outside [0, 1]"))),
        None => VertexSet::from_indices(m.graph.order(), vertices(&m.graph, &a.initial)?),
    };
    let t = Simulator::new(&m.graph).run(&initial, &m.sched, RunOptions::default())?;
    let mut out = table(g, &["round", "infected_count", "new_count"])?;
    for (round, (count, new)) in t.counts.iter().zip(t.new_counts()).enumerate() {
        out.row([round.to_string(), count.to_string(), new.to_string()])?;
    }
    out.finish()?;
    eprintln!("percolated: {}", t.percolated);
    Ok(())
}
