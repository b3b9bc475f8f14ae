use std::process::{Command, Output};

fn bootperc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_bootperc"))
        .args(args)
        .env_remove("BOOTPERC_SEED")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn records(o: &Output) -> Vec<csv::StringRecord> {
    csv::Reader::from_reader(o.stdout.as_slice())
        .records()
        .collect::<Result<_, _>>()
        .unwrap()
}

#[test]
fn exit_codes() {
    assert_eq!(bootperc(&["--help"]).status.code(), Some(0));
    assert_eq!(bootperc(&["scan"]).status.code(), Some(1));
    assert_eq!(bootperc(&["no-such-command"]).status.code(), Some(1));
    let bad_spec = bootperc(&["scan", "--graph", "cube:3", "--p-grid", "0.5"]);
    assert_eq!(bad_spec.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&bad_spec.stderr).contains("cube:3"));
    let over_budget = bootperc(&["profile", "--graph", "hypercube:20", "--k", "3"]);
    assert_eq!(over_budget.status.code(), Some(2));
    let starved = bootperc(&["pc", "--graph", "hypercube:4", "--trials", "20", "--max-doublings", "0"]);
    assert_eq!(starved.status.code(), Some(2));
    // the estimate is still written
    assert_eq!(records(&starved)[0][7].to_string(), "undecided");
    assert_eq!(bootperc(&["verify", "--suite", "nope"]).status.code(), Some(1));
}

#[test]
fn seed_from_env_and_flag() {
    let args = ["scan", "--graph", "hypercube:6", "--p-grid", "0.3", "--trials", "50"];
    let default = bootperc(&args);
    assert!(stdout(&default).trim_end().ends_with(",2009"));
    let env = Command::new(env!("CARGO_BIN_EXE_bootperc"))
        .args(args)
        .env("BOOTPERC_SEED", "77")
        .output()
        .unwrap();
    assert!(stdout(&env).trim_end().ends_with(",77"));
    let flag = Command::new(env!("CARGO_BIN_EXE_bootperc"))
        .args(args)
        .args(["--seed", "78"])
        .env("BOOTPERC_SEED", "77")
        .output()
        .unwrap();
    assert!(stdout(&flag).trim_end().ends_with(",78"));
}

#[test]
fn scan_grid_shapes() {
    let one = bootperc(&["scan", "--graph", "hypercube:6", "--p-grid", "0.3:0.3:0.1", "--trials", "40"]);
    assert_eq!(records(&one).len(), 1);
    let ends = bootperc(&["scan", "--graph", "torus:4^2", "--p-grid", "0:1:0.25", "--trials", "40"]);
    let recs = records(&ends);
    assert_eq!(recs.len(), 5);
    assert_eq!(&recs[0][5], "0.00000");
    assert_eq!(&recs[4][5], "1.00000");
    let uncoupled = bootperc(&["scan", "--graph", "hypercube:6", "--p-grid", "0.2:0.4:0.1", "--coupled", "false"]);
    let seeds: Vec<String> = records(&uncoupled).iter().map(|r| r[8].to_string()).collect();
    assert!(seeds[0] != seeds[1] && seeds[1] != seeds[2]);
}

#[test]
fn timestamp_and_output_file() {
    let dir = std::env::temp_dir().join(format!("bootperc-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("out.csv");
    let path_s = path.to_str().unwrap();
    let o = bootperc(&["profile", "--graph", "torus:5^3", "--k", "2", "--output", path_s, "--timestamp"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(o.stdout.is_empty());
    let text = std::fs::read_to_string(&path).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("i,f_i,exact,timestamp"));
    assert!(lines.next().unwrap().starts_with("1,2,true,"));
    std::fs::remove_dir_all(dir).unwrap();
}

#[test]
fn bounds_examples() {
    let t1 = records(&bootperc(&["bounds", "--theorem1", "--n", "1000000"]));
    let lower: f64 = t1[0][2].parse().unwrap();
    let upper: f64 = t1[1][2].parse().unwrap();
    assert!((lower - 0.496_729).abs() < 5e-7, "{lower}");
    assert!((upper - 0.498_495).abs() < 5e-7, "{upper}");

    let l4 = records(&bootperc(&["bounds", "--layer4", "--d", "10,10", "--p", "0.5", "--t", "5", "--samples", "100000"]));
    assert!(l4[0][2].starts_with("3.678794"));
    assert!(l4.iter().all(|r| &r[7] == "true"));

    let ch = records(&bootperc(&["bounds", "--chernoff", "--n", "100", "--p", "0.5", "--t", "10"]));
    assert!(ch[0][2].starts_with("0.135335"));
    assert!(ch[0][5].starts_with("0.028443966"));

    let sp = records(&bootperc(&["bounds", "--small-p", "--n", "10", "--p", "0.02", "--m", "2"]));
    assert_eq!(&sp[0][4], "false");
}

#[test]
fn partition_output() {
    let o = bootperc(&["partition", "--graph", "hypercube:4", "--kind", "hypercube-sphere", "--k", "2", "--emit-classes"]);
    assert_eq!(o.status.code(), Some(0));
    assert_eq!(stdout(&o), "class,size,members\n0,2,3 12\n1,2,5 10\n2,2,6 9\n");
    let verdict = String::from_utf8_lossy(&o.stderr);
    assert!(verdict.contains("disjoint=true covers=true distance_ok=true count_ok=true"));

    let greedy = bootperc(&["partition", "--graph", "torus:5^1", "--kind", "greedy", "--k", "1", "--m", "3"]);
    assert_eq!(stdout(&greedy), "class,size\n0,2\n1,2\n2,1\n");
    let too_small = bootperc(&["partition", "--graph", "torus:5^1", "--kind", "greedy", "--k", "1", "--m", "2"]);
    assert_eq!(too_small.status.code(), Some(1));
}

#[test]
fn trace_rows_follow_the_engine() {
    let o = bootperc(&["trace", "--graph", "hypercube:2", "--rule", "constant:2", "--initial", "0,3"]);
    assert_eq!(stdout(&o), "round,infected_count,new_count\n0,2,2\n1,4,2\n");
}

#[test]
fn verify_reports_each_invariant() {
    let o = bootperc(&["verify", "--suite", "profiles"]);
    assert_eq!(o.status.code(), Some(0));
    let recs = records(&o);
    assert!(recs.len() >= 2);
    assert!(recs.iter().all(|r| &r[0] == "profiles" && &r[4] == "pass" && &r[3] == "0"));
}
