//! Acceptance criteria 1 to 10, one PASS/FAIL line each.
//!
//! Runs without the libtest harness so the lines always reach the output.
//! The process fails when an attainable criterion fails. Criterion 9 asks
//! for an event of probability about 1.5% to occur in 90% of trials; it is
//! evaluated as stated and reported, and only its deterministic part (an
//! empty component blocks percolation) is enforced.
//!
//! Set `BOOTPERC_BLESS=1` to rewrite the golden CSV files used by
//! criterion 10.

use std::path::{Path, PathBuf};
use std::process::Command;
use std::time::{Duration, Instant};

use bootperc::fixtures;
use bootperc::graph::{parse_adjacency, ProfileMode, SphereNeighborProfile};
use bootperc::sampler::coupling::sample_initial;
use bootperc::sampler::{estimate_pc, BisectionConfig, PercolationPolynomial};
use bootperc::verify::{bound_sandwich, run_suite, Check, Suite, VerifyConfig};
use bootperc::{Graph, ThresholdSchedule};

/// Criteria whose statement cannot hold for the specified parameters.
const UNATTAINABLE: &[u32] = &[9];

struct Outcome {
    id: u32,
    pass: bool,
    /// A failure that does not fail the process (see [`UNATTAINABLE`]).
    excused: bool,
    detail: String,
}

fn core_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core")
}

fn golden_dir() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden")
}

struct Run {
    code: Option<i32>,
    stdout: Vec<u8>,
    stderr: String,
}

fn bootperc(args: &[&str], workers: Option<usize>) -> Run {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_bootperc"));
    cmd.args(args).env_remove("BOOTPERC_SEED").current_dir(core_dir());
    if let Some(w) = workers {
        cmd.arg("--workers").arg(w.to_string());
    }
    let out = cmd.output().expect("bootperc runs");
    Run {
        code: out.status.code(),
        stdout: out.stdout,
        stderr: String::from_utf8_lossy(&out.stderr).into_owned(),
    }
}

fn rows(csv_bytes: &[u8]) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(csv_bytes)
        .records()
        .collect::<Result<_, _>>()
        .expect("well-formed CSV")
}

fn field(rec: &csv::StringRecord, i: usize) -> f64 {
    rec[i].parse().expect("numeric field")
}

fn secs(d: Duration) -> String {
    format!("{:.1}s", d.as_secs_f64())
}

fn suite(id: u32, s: Suite, limit: Option<Duration>, extra: impl Fn(&[Check]) -> bool) -> Outcome {
    let start = Instant::now();
    let report = run_suite(s, &VerifyConfig::default());
    let took = start.elapsed();
    let instances: u64 = report.checks.iter().map(|c| c.instances).sum();
    let failures: u64 = report.checks.iter().map(|c| c.failures).sum();
    let in_time = limit.map_or(true, |l| took < l);
    Outcome {
        id,
        pass: report.passed() && in_time && extra(&report.checks),
        excused: false,
        detail: format!(
            "{}: {} checks, {instances} instances, {failures} failures, {}",
            s.name(),
            report.checks.len(),
            secs(took)
        ),
    }
}

fn criterion_1() -> Outcome {
    // 16 + 256 + 3 * 4096 subsets, three schedules each
    suite(1, Suite::EngineOracle, Some(Duration::from_secs(60)), |checks| {
        checks[0].instances == 3 * (16 + 256 + 3 * 4096)
    })
}

fn criterion_2() -> Outcome {
    let start = Instant::now();
    let q2 = Graph::hypercube(2).unwrap();
    let mut pass = true;
    let mut detail = Vec::new();
    for (r, target) in [(2, (1.0 - 0.5f64.sqrt()).sqrt()), (1, 1.0 - 2f64.powf(-0.25))] {
        // the closed-form root is a root of the exact polynomial
        let poly = PercolationPolynomial::enumerate(&q2, &ThresholdSchedule::constant(r)).unwrap();
        let at_root = poly.eval(target);
        let rule = format!("constant:{r}");
        let run = bootperc(
            &["pc", "--graph", "hypercube:2", "--rule", &rule, "--trials", "4000", "--tol", "0.004"],
            None,
        );
        let rec = &rows(&run.stdout)[0];
        let pc_hat = field(rec, 3);
        let ok = (at_root - 0.5).abs() < 1e-12 && (pc_hat - target).abs() < 0.005;
        pass &= ok;
        detail.push(format!(
            "r={r}: exact P(root)={at_root:.12}, pc_hat={pc_hat} vs {target:.5} ({})",
            &rec[7]
        ));
    }
    let took = start.elapsed();
    pass &= took < Duration::from_secs(30);
    Outcome {
        id: 2,
        excused: false,
        pass,
        detail: format!("{}; {}", detail.join("; "), secs(took)),
    }
}

fn criterion_3() -> Outcome {
    let cfg = VerifyConfig::default();
    assert_eq!((cfg.dominance_dim, cfg.dominance_trials, cfg.dominance_p), (14, 1000, 0.35));
    suite(3, Suite::Dominance, None, |checks| {
        checks.len() == 3 && checks.iter().all(|c| c.instances == cfg.dominance_trials)
    })
}

fn criterion_4() -> Outcome {
    let run = bootperc(
        &["scan", "--graph", "hypercube:10", "--rule", "majority", "--p-grid", "0.1:0.5:0.02", "--trials", "500"],
        None,
    );
    let successes: Vec<u64> = rows(&run.stdout).iter().map(|r| r[4].parse().unwrap()).collect();
    let violations = successes.windows(2).filter(|w| w[1] < w[0]).count();
    Outcome {
        id: 4,
        excused: false,
        pass: run.code == Some(0) && successes.len() == 21 && violations == 0,
        detail: format!("{} grid points, {violations} decreases, successes {successes:?}", successes.len()),
    }
}

fn criterion_5() -> Outcome {
    let start = Instant::now();
    let checks = bound_sandwich(30, &VerifyConfig::default());
    let took = start.elapsed();
    let instances: u64 = checks.iter().map(|c| c.instances).sum();
    let failures: u64 = checks.iter().map(|c| c.failures).sum();
    Outcome {
        id: 5,
        excused: false,
        pass: checks.iter().all(|c| c.passed()) && took < Duration::from_secs(120),
        detail: format!("{} families, {instances} instances, {failures} violations, {}", checks.len(), secs(took)),
    }
}

fn criterion_6() -> Outcome {
    suite(6, Suite::Partitions, None, |_| true)
}

fn criterion_7() -> Outcome {
    let torus = Graph::from_spec("torus:5^3").unwrap();
    let cube = Graph::hypercube(8).unwrap();
    let ft = SphereNeighborProfile::compute(&torus, 3, ProfileMode::Exhaustive).unwrap();
    let fc = SphereNeighborProfile::compute(&cube, 3, ProfileMode::Exhaustive).unwrap();
    let pass = ft.is_exact()
        && fc.is_exact()
        && (1..=3).all(|m| ft.f(m).unwrap() <= m + 1 && fc.f(m).unwrap() == m + 1);
    Outcome {
        id: 7,
        excused: false,
        pass,
        detail: format!("torus:5^3 f = {:?}, hypercube:8 f = {:?}", ft.values(), fc.values()),
    }
}

fn criterion_8() -> Outcome {
    let start = Instant::now();
    let cfg = BisectionConfig::new(2000, 0.005, 2009);
    let est: Vec<_> = [8u32, 12, 16]
        .iter()
        .map(|&n| {
            let q = Graph::hypercube(n).unwrap();
            (n, estimate_pc(&q, &ThresholdSchedule::majority(q.degree()), &cfg).unwrap())
        })
        .collect();
    let in_range = est.iter().all(|(_, e)| 0.05 < e.pc_hat && e.pc_hat < 0.5);
    let (q8, q16) = (&est[0].1, &est[2].1);
    let gap = q16.pc_hat - q8.pc_hat;
    let widths = q8.width() + q16.width();
    let parts: Vec<String> = est
        .iter()
        .map(|(n, e)| format!("Q{n} {:.4} [{:.4}, {:.4}]", e.pc_hat, e.p_lo, e.p_hi))
        .collect();
    Outcome {
        id: 8,
        excused: false,
        pass: in_range && gap > widths,
        detail: format!(
            "{}; Q16-Q8 = {gap:.4} vs widths {widths:.4}; {}",
            parts.join(", "),
            secs(start.elapsed())
        ),
    }
}

fn criterion_9() -> Outcome {
    let part = parse_adjacency(fixtures::HEXAGONAL_PRISM).unwrap();
    let g = Graph::disjoint_union(vec![part; 64]).unwrap();
    let sched = ThresholdSchedule::majority(g.degree());
    let mut sim = bootperc::engine::Simulator::new(&g);
    let (trials, p, seed) = (500u64, 0.5, 2009);
    let (mut blocked, mut implication_breaks) = (0u64, 0u64);
    for t in 0..trials {
        let a0 = sample_initial(&g, p, seed, t);
        let empty_component = g
            .components_hint()
            .iter()
            .any(|range| range.clone().all(|v| !a0.contains(v as u32)));
        if empty_component {
            blocked += 1;
            if sim.percolates(&a0, &sched).unwrap() {
                implication_breaks += 1;
            }
        }
    }
    let frac = blocked as f64 / trials as f64;
    let expected = 1.0 - (1.0 - 0.5f64.powi(12)).powi(64);
    Outcome {
        id: 9,
        pass: frac >= 0.9 && implication_breaks == 0,
        excused: implication_breaks == 0,
        detail: format!(
            "64 x hexagonal prism, p=0.5: empty component in {blocked}/{trials} trials ({:.2}%; P = 1-(1-2^-12)^64 = {:.2}%, \
             so 90% is out of reach); percolation in those trials: {implication_breaks} (implication holds: {})",
            100.0 * frac,
            100.0 * expected,
            implication_breaks == 0
        ),
    }
}

struct Case {
    name: &'static str,
    args: &'static [&'static str],
}

/// One CSV-producing invocation per criterion 1 to 9.
const CASES: &[Case] = &[
    Case { name: "c1_engine_oracle", args: &["verify", "--suite", "engine-oracle"] },
    Case {
        name: "c2_pc_q2",
        args: &["pc", "--graph", "hypercube:2", "--rule", "constant:2", "--trials", "4000", "--tol", "0.004"],
    },
    Case { name: "c3_dominance", args: &["verify", "--suite", "dominance"] },
    Case {
        name: "c4_scan_q10",
        args: &["scan", "--graph", "hypercube:10", "--p-grid", "0.1:0.5:0.02", "--trials", "500"],
    },
    Case { name: "c5_sandwich", args: &["bounds", "--sandwich", "--n-max", "30"] },
    Case { name: "c6_partitions", args: &["verify", "--suite", "partitions"] },
    Case { name: "c7_profile_torus", args: &["profile", "--graph", "torus:5^3", "--k", "3"] },
    Case { name: "c8_pc_q8", args: &["pc", "--graph", "hypercube:8", "--trials", "2000"] },
    Case {
        name: "c9_union_scan",
        args: &["scan", "--graph", "union:64*file:fixtures/hexagonal_prism.adj", "--p-grid", "0.5", "--trials", "500"],
    },
];

fn criterion_10() -> Outcome {
    let bless = std::env::var_os("BOOTPERC_BLESS").is_some();
    let mut problems = Vec::new();
    for case in CASES {
        let a = bootperc(case.args, Some(1));
        let b = bootperc(case.args, Some(3));
        if a.code != b.code || a.stdout != b.stdout {
            problems.push(format!("{}: output depends on worker count", case.name));
            continue;
        }
        if a.code != Some(0) && a.code != Some(2) {
            problems.push(format!("{}: exit {:?}: {}", case.name, a.code, a.stderr.trim()));
        }
        let path = golden_dir().join(format!("{}.csv", case.name));
        if bless {
            std::fs::create_dir_all(golden_dir()).unwrap();
            std::fs::write(&path, &a.stdout).unwrap();
        }
        match std::fs::read(&path) {
            Ok(golden) if golden == a.stdout => {}
            Ok(_) => problems.push(format!("{}: differs from golden file", case.name)),
            Err(_) => problems.push(format!("{}: golden file missing", case.name)),
        }
    }
    Outcome {
        id: 10,
        excused: false,
        pass: problems.is_empty(),
        detail: if problems.is_empty() {
            format!("{} runs byte-identical at 1 and 3 workers and equal to the golden files", CASES.len())
        } else {
            problems.join("; ")
        },
    }
}

fn main() {
    // `cargo test -- --list` and filters: this target has a single entry
    let args: Vec<String> = std::env::args().collect();
    if args.iter().any(|a| a == "--list") {
        println!("acceptance: test");
        return;
    }
    let criteria: [fn() -> Outcome; 10] = [
        criterion_1,
        criterion_2,
        criterion_3,
        criterion_4,
        criterion_5,
        criterion_6,
        criterion_7,
        criterion_8,
        criterion_9,
        criterion_10,
    ];
    let mut hard_failures = Vec::new();
    for run in criteria {
        let o = run();
        let verdict = if o.pass { "PASS" } else { "FAIL" };
        println!("criterion {:>2}: {verdict}  {}", o.id, o.detail);
        if !o.pass && !(o.excused && UNATTAINABLE.contains(&o.id)) {
            hard_failures.push(o.id);
        }
    }
    if hard_failures.is_empty() {
        println!("acceptance: attainable criteria pass; criterion 9 is reported above as stated");
    } else {
        println!("acceptance: failing criteria {hard_failures:?}");
        std::process::exit(1);
    }
}
