use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use gensupport_cli::stats::RunStats;
use gensupport_cli::{bench, instance};

fn manifest() -> &'static Path {
    Path::new(env!("CARGO_MANIFEST_DIR"))
}

fn data(name: &str) -> PathBuf {
    manifest().join("tests/data").join(name)
}

fn gensupport(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gensupport")).args(args).output().expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = gensupport(args);
    assert!(out.status.success(), "{args:?}: {}", String::from_utf8_lossy(&out.stderr));
    String::from_utf8(out.stdout).unwrap()
}

fn solve(file: &Path, extra: &[&str]) -> String {
    let f = file.to_str().unwrap();
    let mut args = vec!["solve", f];
    args.extend_from_slice(extra);
    ok(&args)
}

fn solution_lines(out: &str) -> Vec<&str> {
    out.lines().filter(|l| !l.starts_with("nodes=")).collect()
}

fn summary(out: &str) -> &str {
    out.lines().find(|l| l.starts_with("nodes=")).expect("summary line")
}

#[test]
fn benchmark_matches_golden_file() {
    let golden = fs::read_to_string(manifest().join("tests/golden/bench_n100_c100.txt")).unwrap();
    assert_eq!(bench::benchmark_text(100, 100), golden);
    assert_eq!(ok(&["bench", "--emit"]), golden);
    assert_eq!(golden.lines().filter(|l| l.starts_with("diseq")).count(), 19);
    assert_eq!(golden.lines().filter(|l| *l == "occurrenceleq X 1 90").count(), 100);
}

#[test]
fn scaled_benchmark_round_trips() {
    let inst = instance::parse(&bench::benchmark_text(10, 10)).unwrap();
    assert_eq!(inst, bench::gen_benchmark(10, 10));
    let one = instance::parse(&bench::benchmark_text(100, 1)).unwrap();
    assert_eq!(one.constraints.iter().filter(|c| c.kind() == "occurrenceleq").count(), 1);
}

#[test]
fn sum_table_solutions() {
    let out = solve(&data("sum_geq2.txt"), &["--all"]);
    assert_eq!(solution_lines(&out), ["x=0 y=1 z=1", "x=1 y=0 z=1", "x=1 y=1 z=0", "x=1 y=1 z=1"]);

    let dir = tempfile::tempdir().unwrap();
    let three = dir.path().join("three.txt");
    fs::write(&three, "var x 0 1\nvar y 0 1\nvar z 0 1\nvec X x y z\ntable X : 0 1 1 ; 1 0 1 ; 1 1 0 ;\n").unwrap();
    let out = solve(&three, &["--all"]);
    assert_eq!(solution_lines(&out).len(), 3);
    assert!(summary(&out).contains("solutions=3"));
}

#[test]
fn element_example_has_one_solution() {
    for mode in ["watched", "static"] {
        let out = solve(&data("element.txt"), &["--all", "--occ-mode", mode]);
        assert_eq!(solution_lines(&out), ["x=5 y=0 z=5"]);
    }
}

#[test]
fn forced_occurrence_fails_at_root() {
    let out = solve(&data("infeasible.txt"), &["--all"]);
    assert!(solution_lines(&out).is_empty());
    assert!(summary(&out).starts_with("nodes=0 solutions=0 limit_hit=false"), "{out}");
}

#[test]
fn first_solution_only_without_all() {
    let out = solve(&data("sum_geq2.txt"), &[]);
    assert_eq!(solution_lines(&out), ["x=0 y=1 z=1"]);
}

#[test]
fn modes_agree_on_mixed_instance() {
    let w = solve(&data("mixed.txt"), &["--all", "--occ-mode", "watched"]);
    let s = solve(&data("mixed.txt"), &["--all", "--occ-mode", "static"]);
    assert!(!solution_lines(&w).is_empty());
    assert_eq!(solution_lines(&w), solution_lines(&s));
    let nodes = |o: &str| summary(o).split_whitespace().next().unwrap().to_string();
    assert_eq!(nodes(&w), nodes(&s));
}

#[test]
fn stats_json_keys_and_replay() {
    let dir = tempfile::tempdir().unwrap();
    let mut texts = Vec::new();
    for run in 0..2 {
        let path = dir.path().join(format!("s{run}.json"));
        solve(&data("mixed.txt"), &["--all", "--quiet", "--node-limit", "7", "--stats-json", path.to_str().unwrap()]);
        let text = fs::read_to_string(&path).unwrap();
        let v: serde_json::Value = serde_json::from_str(&text).unwrap();
        let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
        assert_eq!(keys.len(), 5);
        for k in ["nodes", "solutions", "prop_calls", "wall_ms", "limit_hit"] {
            assert!(keys.contains(&k), "{k} missing from {text}");
        }
        let stats: RunStats = serde_json::from_str(&text).unwrap();
        assert_eq!(stats.nodes, 7);
        assert!(stats.limit_hit);
        texts.push(stats.to_json_without_wall());
    }
    assert_eq!(texts[0], texts[1]);
}

#[test]
fn check_gac_on_distinct_scopes() {
    let out = ok(&["check-gac", data("mixed.txt").to_str().unwrap()]);
    assert!(out.contains("element [watched]: gac"), "{out}");
    assert!(out.contains("occurrencegeq [static]: gac"), "{out}");
    assert!(!out.contains("NOT GAC"));
    assert!(out.contains("root fixpoint:"));

    let out = ok(&["check-gac", data("infeasible.txt").to_str().unwrap()]);
    assert!(out.contains("root propagation fails"), "{out}");
}

#[test]
fn verify_small_families() {
    let out = ok(&["verify", "--family", "occleq", "--max-vars", "2", "--max-val", "2"]);
    assert!(out.trim_end().ends_with("0 counterexamples to required properties"), "{out}");
    let out = ok(&["verify", "--family", "occgeq", "--max-vars", "2", "--max-val", "2", "--check", "schema"]);
    assert!(out.lines().all(|l| !l.starts_with("schema") || l.contains(" pass ")), "{out}");

    // P1 is not backtrack-stable; that is reported but not an error
    let out = ok(&["verify", "--family", "element", "--max-vars", "2", "--max-val", "1", "--check", "btstable"]);
    assert!(out.lines().any(|l| l.contains("element.P1") && l.contains("COUNTEREXAMPLE")), "{out}");
}

#[test]
fn bench_csv_rows() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("r.csv");
    let out = ok(&["bench", "--n", "10", "--copies", "3", "--limits", "0,50", "--report-csv", csv.to_str().unwrap()]);
    assert!(out.contains("watched/static time ratio"));
    let text = fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5);
    assert!(lines[1].starts_with("0,watched,0,0,"));
    assert!(lines[4].starts_with("50,static,"));
}

#[test]
fn errors_exit_with_two() {
    let out = gensupport(&["solve", "/nonexistent/instance.txt"]);
    assert_eq!(out.status.code(), Some(2));

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.txt");
    fs::write(&bad, "var x 0 1\nelement Q x x\n").unwrap();
    let out = gensupport(&["solve", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("line 2"));

    assert_eq!(gensupport(&["bench", "--n", "0"]).status.code(), Some(2));
}
