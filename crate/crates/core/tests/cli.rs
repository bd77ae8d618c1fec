use std::path::Path;
use std::process::{Command, Output};

fn sdym(dir: &Path, args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_sdym")).current_dir(dir).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

#[test]
fn zero_connection_has_zero_residual() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    assert_eq!(
        sdym(d, &["gen", "--kind", "zero", "--dims", "4,4,4,4", "--algebra", "su2", "-o", "a.field"]).status.code(),
        Some(0)
    );
    assert_eq!(sdym(d, &["curv", "a.field", "-o", "f.field"]).status.code(), Some(0));
    let out = sdym(d, &["residual", "--metric", "euclid", "--dual", "sd", "f.field"]);
    assert_eq!(out.status.code(), Some(0));
    let text = stdout(&out);
    assert!(text.starts_with("residual 0\n"), "{text}");
    assert_eq!(text.lines().filter(|l| l.starts_with("plane ")).count(), 6);
}

#[test]
fn prop1_check_passes() {
    let dir = tempfile::tempdir().unwrap();
    let out = sdym(dir.path(), &["check", "--relation", "prop1", "--seed", "7"]);
    assert_eq!(out.status.code(), Some(0), "{}", stdout(&out));
    assert!(stdout(&out).ends_with("PASS\n"));
}

#[test]
fn every_relation_passes_and_is_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    for relation in ["13", "prop1", "prop2", "theorem", "star-table", "path-equivalence"] {
        let args = ["check", "--relation", relation, "--seed", "3", "--count", "3"];
        let first = sdym(dir.path(), &args);
        let second = sdym(dir.path(), &args);
        assert_eq!(first.status.code(), Some(0), "{relation}: {}", stdout(&first));
        assert_eq!(first.stdout, second.stdout, "{relation}");
    }
}

#[test]
fn failing_check_exits_one() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    sdym(d, &["gen", "--kind", "random", "--rank", "2", "--dims", "3,3,3,3", "-o", "f.field"]);
    let out = sdym(d, &["check", "--relation", "13", "f.field"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stdout(&out).ends_with("FAIL\n"));
}

#[test]
fn metric_conflict_is_a_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    let gen = [
        "gen",
        "--kind",
        "synthetic",
        "--rank",
        "2",
        "--metric",
        "mink",
        "--dual",
        "sd",
        "--algebra",
        "sl2c",
        "-o",
        "s.field",
    ];
    assert_eq!(sdym(d, &gen).status.code(), Some(0));
    let out = sdym(d, &["residual", "--metric", "euclid", "--dual", "sd", "s.field"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--metric"));
    let ok = sdym(d, &["residual", "--metric", "mink", "--dual", "sd", "s.field"]);
    assert_eq!(ok.status.code(), Some(0));
    assert!(stdout(&ok).starts_with("residual 0\n"));
}

#[test]
fn random_generation_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    for name in ["r1", "r2"] {
        sdym(d, &["gen", "--kind", "random", "--seed", "42", "--dims", "2,3,2,2", "--algebra", "sl2c", "-o", name]);
    }
    sdym(d, &["gen", "--kind", "random", "--seed", "43", "--dims", "2,3,2,2", "--algebra", "sl2c", "-o", "r3"]);
    let read = |n: &str| std::fs::read(d.join(n)).unwrap();
    assert_eq!(read("r1"), read("r2"));
    assert_ne!(read("r1"), read("r3"));
}

#[test]
fn usage_errors_name_the_flag() {
    let dir = tempfile::tempdir().unwrap();
    let out = sdym(dir.path(), &["gen", "--kind", "bogus", "-o", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--kind"));
    let out = sdym(dir.path(), &["residual", "--metric", "lorentz", "--dual", "sd", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--metric"));
    let out = sdym(dir.path(), &["gen", "--kind", "zero", "--dims", "4,4", "-o", "x"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("--dims"));
}

#[test]
fn bad_files_are_usage_errors_naming_the_key() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    sdym(d, &["gen", "--kind", "zero", "--dims", "2,2,2,2", "-o", "a.field"]);
    let text = std::fs::read_to_string(d.join("a.field")).unwrap();
    std::fs::write(d.join("b.field"), text.replace("\"format_version\": 1", "\"format_version\": 9")).unwrap();
    let out = sdym(d, &["curv", "b.field", "-o", "c.field"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("format_version"));
    let out = sdym(d, &["curv", "missing.field", "-o", "c.field"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn star_writes_a_curvature_file() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    sdym(d, &["gen", "--kind", "random", "--rank", "2", "--dims", "2,2,2,2", "-o", "f.field"]);
    assert_eq!(sdym(d, &["star", "--metric", "mink", "f.field", "-o", "s.field"]).status.code(), Some(0));
    let meta: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(d.join("s.field")).unwrap()).unwrap();
    assert_eq!(meta["metadata"]["rank"], 2);
    assert_eq!(meta["metadata"]["metric"], "mink");
    let out = sdym(d, &["star", "--metric", "mink", "missing", "-o", "x"]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn solve_writes_trace_csv() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    sdym(d, &["gen", "--kind", "random", "--seed", "2024", "--scale", "0.01", "--dims", "3,3,3,3", "-o", "a.field"]);
    let args = [
        "solve",
        "--metric",
        "euclid",
        "--dual",
        "sd",
        "--max-iter",
        "10000",
        "--tol",
        "1e-8",
        "--trace",
        "t.csv",
        "a.field",
        "-o",
        "b.field",
    ];
    let out = sdym(d, &args);
    assert_eq!(out.status.code(), Some(0), "{}{}", stdout(&out), stderr(&out));
    let csv = std::fs::read_to_string(d.join("t.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("iteration,residual,step"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert!(rows.len() >= 2);
    assert!(rows.windows(2).all(|w| w[1][1] < w[0][1]));
    assert!(rows.last().unwrap()[1] <= 1e-8);
    let res = sdym(d, &["residual", "--metric", "euclid", "--dual", "sd", "b.field"]);
    let value: f64 = stdout(&res).lines().next().unwrap().strip_prefix("residual ").unwrap().parse().unwrap();
    assert!(value <= 1e-8);
}

#[test]
fn help_exits_zero() {
    let dir = tempfile::tempdir().unwrap();
    let out = sdym(dir.path(), &["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(stdout(&out).contains("solve"));
}
