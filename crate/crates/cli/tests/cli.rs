//! End-to-end checks of the betarep binary: documented exit codes, JSON
//! shapes and byte-identical reruns.

use std::path::PathBuf;
use std::process::{Command, Output};

fn betarep(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_betarep"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> serde_json::Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn scratch(name: &str) -> PathBuf {
    let p = std::env::temp_dir().join(format!("betarep-test-{}-{}", std::process::id(), name));
    let _ = std::fs::remove_file(&p);
    p
}

#[test]
fn represents_one_third_in_binary() {
    let out = betarep(&["represent", "--minpoly", "x-2", "--alphabet", "0..1", "--x", "1/3"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["L"], 0);
    assert_eq!(v["preperiod"], serde_json::json!([]));
    assert_eq!(v["period"], serde_json::json!([0, 1]));
}

#[test]
fn classifies_salem_quartic() {
    let out = betarep(&["classify", "--minpoly", "x^4-x^3-x^2-x+1"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["class"], "Salem");
    assert_eq!(v["weak_greedy"], true);
    assert_eq!(v["witnesses"], serde_json::json!([]));
}

#[test]
fn classify_reports_refusal_witness_without_failing() {
    let out = betarep(&["classify", "--minpoly", "x^2-5"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["class"], "expandingOther");
    assert_eq!(v["weak_greedy"], false);
    assert_eq!(v["witnesses"].as_array().map(Vec::len), Some(1));
}

#[test]
fn verify_round_trips_an_emitted_representation() {
    let rep = scratch("rep.json");
    let rep_path = rep.to_str().unwrap();
    let out = betarep(&[
        "represent", "--minpoly", "x-2", "--alphabet", "0..1", "--x", "1/3", "--emit", rep_path,
    ]);
    assert_eq!(out.status.code(), Some(0));

    let ok = betarep(&["verify", "--rep", rep_path, "--x", "1/3"]);
    assert_eq!(ok.status.code(), Some(0));
    assert_eq!(json_of(&ok)["verified"], true);

    let bad = betarep(&["verify", "--rep", rep_path, "--x", "1/2"]);
    assert_eq!(bad.status.code(), Some(1));
    assert_eq!(json_of(&bad)["verified"], false);

    let _ = std::fs::remove_file(&rep);
}

#[test]
fn exit_codes_follow_the_documented_taxonomy() {
    // unparseable polynomial: usage error
    let out = betarep(&["represent", "--minpoly", "y+1", "--alphabet", "0..1", "--x", "1/3"]);
    assert_eq!(out.status.code(), Some(3));

    // certified refusal: no admissible digit keeps the orbit in the window
    let out = betarep(&[
        "represent", "--minpoly", "x-2", "--alphabet", "0..1", "--x", "-1/3", "--mode",
        "guaranteed",
    ]);
    assert_eq!(out.status.code(), Some(1));

    // budget exhaustion on a divergent orbit: inconclusive
    let out = betarep(&[
        "represent", "--minpoly", "x-2", "--alphabet", "0..1", "--x", "-1/3", "--max-iters",
        "200",
    ]);
    assert_eq!(out.status.code(), Some(2));

    // out-of-range root index: usage error
    let out = betarep(&["classify", "--minpoly", "x^2-5", "--root-index", "9"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn attractor_certifies_symmetric_binary_at_level_one() {
    let out = betarep(&["attractor", "--minpoly", "x-2", "--alphabet", "-1..1", "--check-origin"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["certified"], true);
    assert_eq!(v["certificate"]["n"], 1);
    assert_eq!(v["certificate"]["rho"], "1");
}

#[test]
fn attractor_refuses_one_sided_digits() {
    let out = betarep(&["attractor", "--minpoly", "x-2", "--alphabet", "0..1", "--check-origin"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["certified"], false);
    assert_eq!(v["one_sided"], true);
}

#[test]
fn spectrum_emits_csv_rows_per_point() {
    let csv = scratch("pts.csv");
    let out = betarep(&[
        "spectrum", "--minpoly", "x-2", "--alphabet", "0..1", "--level", "2", "--emit",
        csv.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["points"], 8);
    let text = std::fs::read_to_string(&csv).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "c0,v0");
    assert_eq!(lines.len(), 9);
    // 0, 1, 2, ..., 7 in some enumeration order
    assert!(lines[1..].iter().any(|l| l.starts_with("7,")));
    let _ = std::fs::remove_file(&csv);
}

#[test]
fn crossval_is_deterministic_for_a_fixed_seed() {
    let args = [
        "crossval", "--minpoly", "x-2", "--alphabet", "-1..1", "--samples", "4", "--seed", "7",
    ];
    let a = betarep(&args);
    let b = betarep(&args);
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["q_verified"], 4);
    assert_eq!(v["z_verified"], 4);
    assert_eq!(v["contradictions"], serde_json::json!([]));
}

#[test]
fn help_exits_cleanly() {
    let out = betarep(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(String::from_utf8_lossy(&out.stdout).contains("betarep"));
}
