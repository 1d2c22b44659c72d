use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn maxrs(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_maxrs"))
        .args(args)
        .env("MAXRS_THREADS", "2")
        .output()
        .expect("binary runs")
}

fn ok(args: &[&str]) -> String {
    let out = maxrs(args);
    assert!(
        out.status.success(),
        "{args:?} failed: {}",
        String::from_utf8_lossy(&out.stderr)
    );
    String::from_utf8(out.stdout).unwrap()
}

fn rows(args: &[&str]) -> Vec<Value> {
    serde_json::from_str::<Value>(&ok(args)).unwrap().as_array().unwrap().clone()
}

fn path(dir: &Path, name: &str) -> String {
    dir.join(name).to_str().unwrap().to_string()
}

#[test]
fn planted_static_passes_check() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "p.json");
    ok(&["generate", "--kind", "planted", "--k", "25", "--decoys", "60", "--seed", "4", "--out", &p]);
    let rs = rows(&["run", "--algo", "static", "--in", &p, "--check", "--trials", "3", "--seed", "10"]);
    assert_eq!(rs.len(), 3);
    for (t, r) in rs.iter().enumerate() {
        assert_eq!(r["trial"], t);
        assert_eq!(r["seed"], 10 + t as u64);
        assert_eq!(r["oracle_pass"], true);
        assert_eq!(r["opt_if_known"], 25.0);
        assert!(r["ratio"].as_f64().unwrap() >= 0.3);
    }
}

#[test]
fn generated_file_round_trips_through_stdout() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "c.json");
    ok(&["generate", "--kind", "random-colored", "--n", "30", "--seed", "2", "--out", &p]);
    let printed = ok(&["generate", "--kind", "random-colored", "--n", "30", "--seed", "2"]);
    assert_eq!(std::fs::read_to_string(&p).unwrap(), printed);
    let v: Value = serde_json::from_str(&printed).unwrap();
    assert_eq!(v["kind"], "colored_disks");
    assert_eq!(v["items"].as_array().unwrap().len(), 30);
}

#[test]
fn colored_exact_matches_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "c.json");
    ok(&["generate", "--kind", "random-colored", "--n", "40", "--colors", "6", "--side", "4", "--seed", "8", "--out", &p]);
    for algo in ["colored-exact", "first-algorithm"] {
        let r = &rows(&["run", "--algo", algo, "--in", &p, "--check"])[0];
        assert_eq!(r["ratio"], 1.0, "{algo}");
        assert_eq!(r["oracle_pass"], true, "{algo}");
    }
}

#[test]
fn reductions_match_brute_force() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "s.json");
    ok(&["generate", "--kind", "sequences", "--n", "17", "--pairs", "3", "--seed", "5", "--out", &p]);
    for args in [&["--algo", "minplus-batched", "--m", "4"][..], &["--algo", "minplus-bsei"][..]] {
        let mut full = vec!["run", "--in", &p, "--check"];
        full.extend_from_slice(args);
        let rs = rows(&full);
        assert_eq!(rs.len(), 3);
        assert!(rs.iter().all(|r| r["exact_match"] == true), "{args:?}");
    }
    let b = path(dir.path(), "b.json");
    ok(&["generate", "--kind", "batched1d", "--n", "9", "--m", "5", "--out", &b]);
    let r = &rows(&["run", "--algo", "batched1d", "--in", &b, "--check"])[0];
    assert_eq!(r["exact_match"], true);
    assert_eq!(r["output"].as_str().unwrap().split(' ').count(), 5);
}

#[test]
fn trace_gives_one_row_per_query() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "t.ndjson");
    ok(&["generate", "--kind", "trace", "--n", "60", "--max-live", "15", "--seed", "1", "--out", &p]);
    let queries = std::fs::read_to_string(&p)
        .unwrap()
        .lines()
        .filter(|l| l.contains("\"query\""))
        .count();
    let rs = rows(&["run", "--algo", "dynamic", "--in", &p, "--check"]);
    assert_eq!(rs.len(), queries);
    for (i, r) in rs.iter().enumerate() {
        assert_eq!(r["item"], i);
        assert_eq!(r["oracle_pass"], true);
    }
}

#[test]
fn csv_output_has_header_and_rows() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "p.json");
    let out = path(dir.path(), "r.csv");
    ok(&["generate", "--kind", "planted", "--k", "10", "--decoys", "10", "--out", &p]);
    ok(&["run", "--algo", "brute", "--in", &p, "--trials", "2", "--format", "csv", "--out", &out]);
    let text = std::fs::read_to_string(&out).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 3);
    assert!(lines[0].starts_with("trial,algorithm,kind,n"));
}

#[test]
fn bench_reports_one_row_per_size() {
    let rs = rows(&["bench", "--sizes", "100,200,400", "--updates", "5", "--c-sample", "0.02"]);
    assert_eq!(rs.len(), 3);
    let ns: Vec<u64> = rs.iter().map(|r| r["n"].as_u64().unwrap()).collect();
    assert_eq!(ns, [100, 200, 400]);
    assert!(rs.iter().all(|r| r["median_us"].as_f64().unwrap() > 0.0));
}

#[test]
fn runs_are_deterministic() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "c.json");
    ok(&["generate", "--kind", "planted-colored", "--k", "12", "--decoys", "40", "--seed", "6", "--out", &p]);
    let strip = |mut rs: Vec<Value>| {
        for r in &mut rs {
            r.as_object_mut().unwrap().remove("wall_ms");
        }
        rs
    };
    let a = strip(rows(&["run", "--algo", "colored-sample", "--in", &p, "--trials", "3"]));
    let b = strip(rows(&["run", "--algo", "colored-sample", "--in", &p, "--trials", "3"]));
    assert_eq!(a, b);
}

#[test]
fn bad_inputs_exit_with_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let p = path(dir.path(), "bad.json");
    std::fs::write(&p, "{\"kind\": \"balls\", \"d\": 2, \"items\": [{\"id\": 0}]}").unwrap();
    assert_eq!(maxrs(&["run", "--algo", "static", "--in", &p]).status.code(), Some(2));
    let missing = path(dir.path(), "missing.json");
    assert_eq!(maxrs(&["run", "--algo", "static", "--in", &missing]).status.code(), Some(2));
    let s = path(dir.path(), "s.json");
    ok(&["generate", "--kind", "sequences", "--n", "4", "--out", &s]);
    assert_eq!(maxrs(&["run", "--algo", "static", "--in", &s]).status.code(), Some(2));
    assert_eq!(maxrs(&["run", "--algo", "static", "--in", &s, "--trials", "0"]).status.code(), Some(2));
    assert_eq!(maxrs(&["run", "--algo", "brute", "--in", &s, "--d", "2"]).status.code(), Some(2));
    assert!(!maxrs(&["generate", "--kind", "planted", "--d", "0"]).status.success());
    assert!(!maxrs(&["generate"]).status.success());
}
