use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn tpa(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_tpa")).args(args).env_remove("TPA_SEED").output().expect("binary runs")
}

fn code(o: &Output) -> i32 {
    o.status.code().expect("exit code")
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

fn write(dir: &Path, name: &str, text: &str) -> String {
    let p = dir.join(name);
    fs::write(&p, text).unwrap();
    p.to_str().unwrap().to_string()
}

#[test]
fn derivation_dimensions() {
    for (family, n, dim) in [("tn", "4", 6), ("mn", "3", 2), ("sln", "2", 1)] {
        let o = tpa(&["derivations", "--algebra", family, "--n", n, "--weight", "1/2"]);
        assert_eq!(code(&o), 0);
        let v = stdout_json(&o);
        assert_eq!(v["dimension"], dim);
        assert_eq!(v["basis"].as_array().unwrap().len(), dim);
        assert_eq!(v["tool"], "tpa");
        assert!(v["version"].is_string());
        assert_eq!(v["algebra_spec"], format!("{family}:{n}"));
    }
}

#[test]
fn derivations_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("d.json");
    let o = tpa(&["derivations", "--algebra", "tn", "--n", "3", "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let v: Value = serde_json::from_str(&fs::read_to_string(&out).unwrap()).unwrap();
    assert_eq!(v["dimension"], 5);
    let names: Vec<_> = fs::read_dir(dir.path()).unwrap().map(|e| e.unwrap().file_name()).collect();
    assert_eq!(names.len(), 1, "no temporary files left behind");
}

#[test]
fn algebra_from_file() {
    let dir = tempfile::tempdir().unwrap();
    // [x0, x1] = x1.
    let alg = write(dir.path(), "a.json", r#"{"dim": 2, "brackets": [{"i": 0, "j": 1, "coeffs": {"1": "1"}}]}"#);
    let o = tpa(&["derivations", "--algebra", "file", "--file", &alg, "--weight", "1"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["dimension"], 2);
    let bad = write(dir.path(), "bad.json", r#"{"dim": 2, "brackets": [{"i": 1, "j": 0, "coeffs": {"1": "1"}}]}"#);
    assert_eq!(code(&tpa(&["derivations", "--algebra", "file", "--file", &bad])), 3);
}

#[test]
fn verify_catalog_entries() {
    let o = tpa(&["verify", "--catalog", "t2:T16"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["is_tp"], true);
    assert_eq!(v["poisson_type"], false);

    let o = tpa(&["verify", "--catalog", "mn_trace", "--n", "2"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    assert_eq!(v["is_tp"], true);
    assert_eq!(v["poisson_type"], true);

    let o = tpa(&["verify", "--algebra", "tn", "--n", "2", "--catalog", "t2:T19_c", "--c", "-1/2"]);
    assert_eq!(code(&o), 0);
}

#[test]
fn verify_reports_failing_triple() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", r#"{"dim": 3, "products": [{"i": 0, "j": 0, "coeffs": {"0": "1"}}]}"#);
    let o = tpa(&["verify", "--algebra", "tn", "--n", "2", "--product", &p]);
    assert_eq!(code(&o), 1);
    let v = stdout_json(&o);
    assert_eq!(v["is_tp"], false);
    assert_eq!(v["transposed_leibniz"], false);
    assert!(v["transposed_leibniz_failure"].is_array());
}

#[test]
fn input_errors() {
    let dir = tempfile::tempdir().unwrap();
    let p = write(dir.path(), "p.json", r#"{"dim": 3, "products": []}"#);
    assert_eq!(code(&tpa(&["verify", "--algebra", "tn", "--n", "3", "--product", &p])), 3);
    let garbage = write(dir.path(), "g.json", "{");
    assert_eq!(code(&tpa(&["verify", "--algebra", "tn", "--n", "2", "--product", &garbage])), 3);
    let asym = write(
        dir.path(),
        "s.json",
        r#"{"dim": 3, "products": [{"i": 0, "j": 1, "coeffs": {"1": "1"}}, {"i": 1, "j": 0, "coeffs": {"1": "2"}}]}"#,
    );
    assert_eq!(code(&tpa(&["verify", "--algebra", "tn", "--n", "2", "--product", &asym])), 3);
    assert_eq!(code(&tpa(&["verify", "--catalog", "mn_trace", "--n", "2", "--algebra", "tn"])), 3);
    assert_eq!(code(&tpa(&["verify", "--catalog", "t2:T16", "--algebra", "mn", "--n", "2"])), 3);
    assert_eq!(code(&tpa(&["verify", "--algebra", "tn", "--n", "2", "--product", "/nonexistent/p.json"])), 4);
}

#[test]
fn usage_errors() {
    assert_eq!(code(&tpa(&[])), 2);
    assert_eq!(code(&tpa(&["frobnicate"])), 2);
    assert_eq!(code(&tpa(&["derivations", "--algebra", "tn"])), 2);
    assert_eq!(code(&tpa(&["derivations", "--algebra", "klein", "--n", "2"])), 2);
    assert_eq!(code(&tpa(&["verify", "--catalog", "t2:nope"])), 2);
    assert_eq!(code(&tpa(&["reproduce", "--n-max", "9"])), 2);
}

#[test]
fn search_is_seeded() {
    let a = tpa(&["search", "--algebra", "tn", "--n", "3", "--count", "10", "--seed", "5"]);
    let b = tpa(&["search", "--algebra", "tn", "--n", "3", "--count", "10", "--seed", "5"]);
    assert_eq!(code(&a), 0);
    assert_eq!(a.stdout, b.stdout);
    let v = stdout_json(&a);
    assert_eq!(v["seed"], 5);
    assert_eq!(v["samples"], 10);
    assert_eq!(v["pattern_violations"].as_array().unwrap().len(), 0);

    let env = Command::new(env!("CARGO_BIN_EXE_tpa"))
        .args(["search", "--algebra", "mn", "--n", "2"])
        .env("TPA_SEED", "77")
        .output()
        .unwrap();
    assert_eq!(stdout_json(&env)["seed"], 77);
}

#[test]
fn transport_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    // Conjugation by [[1, 1], [0, 1]] on T_2 in the basis e11, e12, e22.
    let map =
        write(dir.path(), "g.json", r#"{"dim": 3, "columns": [["1", "-1", "0"], ["0", "1", "0"], ["0", "1", "1"]]}"#);
    let o = tpa(&["transport", "--catalog", "t2:T18", "--map", &map]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let q = write(dir.path(), "q.json", &v["product"].to_string());
    assert_eq!(code(&tpa(&["verify", "--algebra", "tn", "--n", "2", "--product", &q])), 0);

    let not_aut =
        write(dir.path(), "n.json", r#"{"dim": 3, "columns": [["1", "0", "0"], ["0", "2", "0"], ["0", "0", "3"]]}"#);
    assert_eq!(code(&tpa(&["transport", "--catalog", "t2:T18", "--map", &not_aut])), 3);

    let o = tpa(&["transport", "--catalog", "mn_trace", "--n", "3", "--random", "--seed", "9"]);
    assert_eq!(code(&o), 0);
    assert_eq!(stdout_json(&o)["seed"], 9);
    assert_eq!(code(&tpa(&["transport", "--catalog", "t2:T18"])), 2);
}

#[test]
fn reproduce_small_run() {
    let dir = tempfile::tempdir().unwrap();
    let out = dir.path().join("reports");
    let o = tpa(&["reproduce", "--n-max", "2", "--seed", "3", "--out-dir", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stdout));
    assert_eq!(String::from_utf8_lossy(&o.stdout).lines().filter(|l| l.contains("PASS")).count(), 10);
    let summary: Value = serde_json::from_str(&fs::read_to_string(out.join("summary.json")).unwrap()).unwrap();
    assert_eq!(summary["all_passed"], true);
    assert_eq!(summary["seed"], 3);
    let c6: Value = serde_json::from_str(&fs::read_to_string(out.join("criterion_06.json")).unwrap()).unwrap();
    let details = c6["criterion"]["details"].as_array().unwrap();
    assert!(details.iter().all(|d| d.as_str().unwrap().contains("M_2")));

    let first = fs::read(out.join("criterion_07.json")).unwrap();
    let again = dir.path().join("again");
    assert_eq!(code(&tpa(&["reproduce", "--n-max", "2", "--seed", "3", "--out-dir", again.to_str().unwrap()])), 0);
    assert_eq!(first, fs::read(again.join("criterion_07.json")).unwrap());
}

#[test]
fn reproduce_unwritable_out_dir() {
    let dir = tempfile::tempdir().unwrap();
    let blocker = write(dir.path(), "file", "x");
    let o = tpa(&["reproduce", "--n-max", "2", "--out-dir", &format!("{blocker}/sub")]);
    assert_eq!(code(&o), 4);
}
