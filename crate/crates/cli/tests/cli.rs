use std::process::{Command, Output};

use serde_json::Value;

fn cglmp(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cglmp")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("valid JSON")
}

#[test]
fn value_of_pure_qutrit() {
    let v = json(&cglmp(&["value", "--d", "3", "--q", "1", "--state", "max-entangled"]));
    let keys: Vec<&str> = v.as_object().unwrap().keys().map(String::as_str).collect();
    assert_eq!(keys, ["command", "params", "results", "checks"]);
    assert!((v["results"]["value"].as_f64().unwrap() - 2.8729340511723382).abs() < 1e-10);
    assert_eq!(v["results"]["violated"], true);
}

#[test]
fn qubit_filtered_threshold() {
    let v = json(&cglmp(&["threshold", "--d", "2", "--filtered", "--xi", "0.79"]));
    let q = v["results"]["q_star"].as_f64().unwrap();
    assert!((q - 0.665).abs() < 0.005, "q* = {q}");
    assert_eq!(v["results"]["boundary"], "crossing");
}

#[test]
fn table_one_layout() {
    let out = cglmp(&["tables", "--which", "1"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("d,q_unfiltered,q_filtered,xi"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|x| x.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 9);
    assert_eq!(rows[0][0], 3.0);
    assert!((rows[0][1] - 0.696).abs() < 0.002);
    assert_eq!(rows[8][0], 100.0);
}

#[test]
fn region_csv_to_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("grid.csv");
    let p = path.to_str().unwrap();
    let out = cglmp(&["region", "--d", "3", "--q-grid", "0.7:1:2", "--xi-grid", "0.5:0.9:2", "--output", p]);
    assert!(out.status.success());
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines[0], "d,q,xi,value,violated");
    // (0.7, 0.9) lies outside ξ ≤ √q
    assert_eq!(lines.len(), 4);
    assert!(lines[1].starts_with("3,0.7,0.5,"));
    assert!(lines[3].ends_with(",true"));

    let again = dir.path().join("again.csv");
    cglmp(&[
        "region",
        "--d",
        "3",
        "--q-grid",
        "0.7:1:2",
        "--xi-grid",
        "0.5:0.9:2",
        "--output",
        again.to_str().unwrap(),
    ]);
    assert_eq!(std::fs::read(&path).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn full_two_by_two_region() {
    let out = cglmp(&["region", "--d", "4", "--q-grid", "0.8:1:2", "--xi-grid", "0.2:0.4:2"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap().lines().count(), 5);
}

#[test]
fn empty_region_is_header_only() {
    let out = cglmp(&["region", "--d", "3", "--q-grid", "0:1:0", "--xi-grid", "0:1:0"]);
    assert_eq!(String::from_utf8(out.stdout).unwrap(), "d,q,xi,value,violated\n");
}

#[test]
fn region_boundary_tracks_threshold() {
    let out = cglmp(&["region", "--d", "5", "--q-grid", "0.58:0.64:7", "--xi-grid", "0.71:0.71:1"]);
    let text = String::from_utf8(out.stdout).unwrap();
    let first_violated = text
        .lines()
        .skip(1)
        .find(|l| l.ends_with("true"))
        .and_then(|l| l.split(',').nth(1))
        .map(|q| q.parse::<f64>().unwrap())
        .unwrap();
    assert!((first_violated - 0.61).abs() < 1e-12, "boundary cell {first_violated}");
}

#[test]
fn exit_codes() {
    assert_eq!(cglmp(&["value", "--d", "3"]).status.code(), Some(2));
    assert_eq!(cglmp(&["value", "--d", "3", "--q", "1.5"]).status.code(), Some(2));
    assert_eq!(cglmp(&["value", "--d", "3", "--q", "1", "--xi", "0.5"]).status.code(), Some(2));
    assert_eq!(cglmp(&["frobnicate"]).status.code(), Some(2));
    assert_eq!(cglmp(&["value", "--d", "3", "--q", "1", "--format", "csv"]).status.code(), Some(2));
    let bad = cglmp(&[
        "region",
        "--d",
        "3",
        "--q-grid",
        "0.5:1:2",
        "--xi-grid",
        "0.5:1:2",
        "--output",
        "/nonexistent/dir/x.csv",
    ]);
    assert_eq!(bad.status.code(), Some(4));
}

#[test]
fn verify_passes_and_localizes_cross_term() {
    let v = json(&cglmp(&["verify"]));
    assert!(v["checks"].as_array().unwrap().iter().all(|c| c["pass"] == true));
    for probe in v["results"]["cross_term"].as_array().unwrap() {
        assert!(probe["reciprocal_sine_error"].as_f64().unwrap().abs() > 1e-3);
    }
}

#[test]
fn gammas_for_qutrits() {
    let v = json(&cglmp(&["gammas", "--d", "3", "--seed", "9"]));
    assert!((v["results"]["value"].as_f64().unwrap() - 2.915).abs() < 1e-3);
}
