use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_northcott")).args(args).output().expect("binary runs")
}

fn json(args: &[&str]) -> Value {
    let o = run(args);
    assert!(o.status.success(), "{args:?}: {}", String::from_utf8_lossy(&o.stderr));
    serde_json::from_slice(&o.stdout).expect("stdout is JSON")
}

#[test]
fn documented_examples() {
    assert_eq!(json(&["find-prime", "--lo", "86.49", "--hi", "173", "--a", "10", "--m", "121"])["prime"], "131");
    assert_eq!(json(&["dedekind", "--poly", "x^3-17", "--q", "3"])["index_coprime"], false);

    let dir = tempfile::tempdir().unwrap();
    let pts = dir.path().join("points.csv");
    std::fs::write(&pts, "3,0\n").unwrap();
    let v = json(&["discrepancy", "--points", pts.to_str().unwrap(), "--tol", "1e-6"]);
    assert_eq!(v["value"]["lo"], "1.999999");
    assert_eq!(v["value"]["hi"], "2.000001");
}

#[test]
fn construct_then_verify() {
    let dir = tempfile::tempdir().unwrap();
    let cert = dir.path().join("cert.json");
    let c = cert.to_str().unwrap();
    let o = run(&["construct", "--variant", "b", "--t", "2", "--steps", "3", "--d-seed", "7", "--ordering", "weak", "--out", c]);
    assert!(o.status.success());
    assert!(o.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&cert).unwrap()).unwrap();
    assert_eq!(v["schema"], 1);
    assert_eq!(v["tower"]["steps"][0]["p"], "251");
    let r = json(&["verify", c]);
    assert_eq!(r["passed"], true);

    let report = run(&["bounds-report", "--cert", c, "--claimed", "2", "--format", "csv"]);
    let text = String::from_utf8(report.stdout).unwrap();
    assert!(text.starts_with("step,eta_lo,eta_hi,house_lo,house_hi,window_ok\n"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn exit_codes() {
    let code = |args: &[&str]| run(args).status.code().unwrap();
    assert_eq!(code(&["construct", "--variant", "a", "--t", "2", "--steps", "1", "--d-seed", "7"]), 3);
    assert_eq!(code(&["construct", "--variant", "b", "--t", "1", "--steps", "1", "--d-seed", "7"]), 2);
    assert_eq!(code(&["house", "--tower", "131:11", "--element", "x1^11"]), 2);
    assert_eq!(code(&["no-such-command"]), 2);
    assert_eq!(code(&["dedekind", "--poly", "x^3-17", "--q", "3", "--format", "xml"]), 2);
    assert_eq!(code(&["find-prime", "--lo", "24", "--hi", "28", "--a", "1", "--m", "2"]), 3);

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{ not json").unwrap();
    let o = run(&["verify", bad.to_str().unwrap()]);
    assert_eq!(o.status.code(), Some(1));
    assert_eq!(String::from_utf8_lossy(&o.stderr).lines().count(), 1);

    let pts = dir.path().join("p.csv");
    std::fs::write(&pts, "1,0,0.01\n").unwrap();
    assert_eq!(code(&["discrepancy", "--points", pts.to_str().unwrap(), "--tol", "1e-6"]), 4);
}

#[test]
fn output_is_deterministic() {
    let args = ["lemma-check", "--suite", "product", "--instances", "40", "--seed", "9"];
    let a = run(&args);
    let b = run(&[&args[..], &["--threads", "2"]].concat());
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
    let v: Value = serde_json::from_slice(&a.stdout).unwrap();
    assert_eq!(v["violations"], 0);

    let args = ["enumerate-min-house", "--tower", "5:3,7:2", "--coeff-bound", "1"];
    assert_eq!(run(&args).stdout, run(&[&args[..], &["--threads", "1"]].concat()).stdout);
    assert_eq!(json(&args)["at_generator"], true);
}

#[test]
fn heights_and_eta() {
    let h = json(&["house", "--tower", "5:3", "--element", "x1"]);
    assert_eq!(h["value"]["lo"], "1.709975946");
    let w = json(&["height", "--tower", "101:5", "--element", "x1"]);
    assert_eq!(w["kind"], "weil");
    let e = json(&["eta", "--tower", "5:3", "--step", "1"]);
    assert_eq!(e["vacuous"], false);
    let csv = run(&["house", "--tower", "5:3", "--element", "x1", "--format", "csv"]);
    assert_eq!(String::from_utf8(csv.stdout).unwrap(), "kind,value_hi,value_lo\nhouse,1.709975947,1.709975946\n");
}

#[test]
fn strict_ordering_rejects_towers() {
    assert_eq!(run(&["house", "--tower", "7:3,5:2", "--element", "x2", "--ordering", "strict"]).status.code(), Some(2));
}
