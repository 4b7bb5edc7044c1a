use std::process::{Command, Output};

use serde_json::Value;

fn slopekit(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_slopekit")).args(args).output().expect("binary runs")
}

fn json(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("json on stdout")
}

fn quantity<'a>(report: &'a Value, name: &str) -> &'a Value {
    report["quantities"].as_array().unwrap().iter().find(|q| q["name"] == name).unwrap_or_else(|| panic!("no {name}"))
}

#[test]
fn abs_has_unit_modulus_and_every_condition() {
    let out = slopekit(&["analyze", "catalog:abs", "--at", "0", "--format", "json", "--expect", "true"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(quantity(&r, "er_modulus")["value"].as_f64(), Some(1.0));
    let conditions = r["verdict"]["conditions"].as_array().unwrap();
    assert_eq!(conditions.len(), 7);
    assert!(conditions.iter().all(|c| c["holds"] == true));
    assert_eq!(r["headline"]["holds"], true);
}

#[test]
fn parabola_mapping_is_not_subregular() {
    let out = slopekit(&["analyze", "catalog:parabola-mapping", "--format", "json", "--expect", "false"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    let sr = quantity(&r, "sr");
    let finest = sr["per_radius"].as_array().unwrap().last().unwrap()[1].as_f64().unwrap();
    assert!(finest <= 0.1);
    assert_eq!(r["headline"]["property"], "metric subregularity");
    assert_eq!(r["headline"]["holds"], false);
}

#[test]
fn expectation_mismatch_exits_one() {
    let out = slopekit(&["analyze", "catalog:parabola-mapping", "--expect", "true"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn malformed_spec_exits_two_with_a_located_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, "{\n  \"kind\": \"function\",\n  \"fixture\": \"abs\",\n  \"schedule\": {\"rho0\": \"one\", \"gamma\": 0.5, \"steps\": 3}\n}\n").unwrap();
    let out = slopekit(&["analyze", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains(":4:"), "{err}");
    assert!(err.contains("schedule.rho0"), "{err}");
}

#[test]
fn unknown_fixture_and_bad_flags_exit_two() {
    assert_eq!(slopekit(&["analyze", "catalog:nope"]).status.code(), Some(2));
    assert_eq!(slopekit(&["analyze", "catalog:abs", "--schedule", "1,0.5"]).status.code(), Some(2));
    assert_eq!(slopekit(&["analyze", "catalog:abs-sum", "--at", "0"]).status.code(), Some(2));
    assert_eq!(slopekit(&["verify", "--filter", "nothing-matches"]).status.code(), Some(2));
}

#[test]
fn catalog_specs_round_trip_through_analyze() {
    let list = json(&slopekit(&["catalog", "--format", "json"]));
    let dir = tempfile::tempdir().unwrap();
    for entry in list.as_array().unwrap() {
        let name = entry["name"].as_str().unwrap();
        let spec = slopekit(&["catalog", "--spec", name]);
        assert!(spec.status.success());
        let path = dir.path().join(format!("{name}.json"));
        std::fs::write(&path, &spec.stdout).unwrap();
        let from_file = slopekit(&["analyze", path.to_str().unwrap(), "--format", "json"]);
        let from_catalog = slopekit(&["analyze", &format!("catalog:{name}"), "--format", "json"]);
        assert!(from_file.status.success(), "{name}: {}", String::from_utf8_lossy(&from_file.stderr));
        let (mut a, mut b) = (json(&from_file), json(&from_catalog));
        a["input"] = Value::Null;
        b["input"] = Value::Null;
        assert_eq!(a, b, "{name}");
    }
}

#[test]
fn finite_table_spec_is_exact() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("path.json");
    let spec = r#"{
        "kind": "function",
        "finite": {
            "space": {"points": [[0], [1], [2]], "norm": "L1"},
            "values": [0, 2, "inf"],
            "base": 0
        }
    }"#;
    std::fs::write(&path, spec).unwrap();
    // with the default schedule every band around the isolated base is empty
    let out = slopekit(&["analyze", path.to_str().unwrap(), "--format", "json"]);
    assert_eq!(quantity(&json(&out), "er_modulus")["value"], "inf");
    let out = slopekit(&["analyze", path.to_str().unwrap(), "--format", "json", "--schedule", "8,0.5,2"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let r = json(&out);
    assert_eq!(quantity(&r, "er_modulus")["value"].as_f64(), Some(2.0));
    assert_eq!(r["ground_truth"], Value::Array(vec![]));
}

#[test]
fn output_directory_gets_every_format() {
    let dir = tempfile::tempdir().unwrap();
    let out = slopekit(&["analyze", "catalog:positive-part", "--output", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    for ext in ["json", "txt", "csv"] {
        let body = std::fs::read_to_string(dir.path().join(format!("report.{ext}"))).unwrap();
        assert!(!body.is_empty());
    }
    let csv = std::fs::read_to_string(dir.path().join("report.csv")).unwrap();
    assert!(csv.starts_with("section,name,at,rho,value\n"));
}

#[test]
fn verify_filter_runs_only_the_selected_check() {
    let out = slopekit(&["verify", "--filter", "prop1", "--seed", "3", "--format", "json"]);
    assert!(out.status.success());
    let r = json(&out);
    let ids: Vec<&str> = r["checks"].as_array().unwrap().iter().map(|c| c["id"].as_str().unwrap()).collect();
    assert_eq!(ids, ["prop1"]);
    assert_eq!(r["passed"], true);
}
