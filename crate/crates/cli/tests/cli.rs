use std::fs;
use std::process::{Command, Output};

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_neurovariety"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

#[test]
fn ambient_prints_the_dimension() {
    let out = run(&["ambient", "--arch", "2-3-4-5-4-6-4-1", "--r", "2"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "65\n");
}

#[test]
fn dim_reports_status() {
    let out = run(&["dim", "--arch", "2-4-5-4", "--r", "2"]);
    assert_eq!(stdout(&out).trim(), "rank_lower=20 status=certified_filling");
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("prime=2147483647") && err.contains("trials=3") && err.contains("seed=0"));
}

#[test]
fn exit_codes() {
    assert_eq!(run(&["dim", "--arch", "2-x-1"]).status.code(), Some(2));
    assert_eq!(run(&["dim", "--arch", "2-2-1", "--prime", "100"]).status.code(), Some(2));
    assert_eq!(run(&["dim"]).status.code(), Some(2));
    assert_eq!(run(&["reproduce", "--table", "table9"]).status.code(), Some(2));
    // a prime no larger than r cannot see any derivative
    assert_eq!(run(&["dim", "--arch", "2-2-1", "--r", "3", "--prime", "3"]).status.code(), Some(1));
    // 20 variables at degree 2^9 is far past the ambient cap
    assert_eq!(run(&["ambient", "--arch", "20-2-2-2-2-2-2-2-2-2-1"]).status.code(), Some(1));
}

#[test]
fn reproduce_mismatch_exits_three() {
    let out = run(&["reproduce", "--table", "bounds_table", "--prime", "5", "--trials", "1"]);
    assert_eq!(out.status.code(), Some(3), "{}", stdout(&out));
    assert!(stdout(&out).contains("MISMATCH"));
}

#[test]
fn reproduce_bounds_table() {
    let out = run(&["reproduce", "--table", "bounds_table", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v[0]["cells"].as_array().unwrap().iter().all(|c| c["pass"] == true));
}

#[test]
fn certify_text_report() {
    let out = run(&["certify", "--arch", "2-3-4-5-4-6-4-1"]);
    let text = stdout(&out);
    assert!(text.contains("unimodal=false"), "{text}");
    assert!(text.contains("overall=mfa_certified"), "{text}");
}

#[test]
fn defect_of_depth9_decrement() {
    let out = run(&["defect", "--arch", "2-3-4-4-9-17-11-12-4-2", "--format", "json"]);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!((v["codim"].as_u64(), v["defect"].as_i64()), (Some(5), Some(5)));
}

#[test]
fn facts_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("facts.json");
    let facts = facts.to_str().unwrap();
    assert!(run(&["dim", "--arch", "2-2-4-5-4-6-4-1", "--facts", facts]).status.success());
    let out = run(&["bound", "--arch", "2-2-4-5-4-6-4-1", "--facts", facts]);
    assert!(stdout(&out).starts_with("bound=35 ambient=65 status=certified_exact"), "{}", stdout(&out));
    let first = fs::read_to_string(facts).unwrap();
    // rerunning with the same facts changes nothing
    assert!(run(&["bound", "--arch", "2-2-4-5-4-6-4-1", "--facts", facts]).status.success());
    assert_eq!(fs::read_to_string(facts).unwrap(), first);
    let parsed: Vec<serde_json::Value> = serde_json::from_str(&first).unwrap();
    assert_eq!(parsed.len(), 1);
    assert_eq!(parsed[0]["status"], "certified_exact");
}

#[test]
fn corrupt_facts_file_is_an_error() {
    let dir = tempfile::tempdir().unwrap();
    let facts = dir.path().join("facts.json");
    fs::write(&facts, "{ not json").unwrap();
    let out = run(&["dim", "--arch", "2-2-1", "--facts", facts.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn search_csv_and_warm_start() {
    let dir = tempfile::tempdir().unwrap();
    let csv = dir.path().join("search.csv");
    let csv = csv.to_str().unwrap();
    let out = run(&[
        "search", "--depth", "4", "--max-width", "4", "--budget", "3000", "--format", "csv", "--out", csv,
    ]);
    assert!(out.status.success());
    let text = fs::read_to_string(csv).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next().unwrap(),
        "r,depth,architecture,class,unimodal,ambient_dim,rank_lower,upper_bound,prime,trials,seed"
    );
    assert!(text.contains("2,4,2-3-3-2-1,minimal_filling,true,9,9,9,2147483647,3,0"), "{text}");

    let out = run(&["search", "--depth", "4", "--max-width", "4", "--warm-start", csv]);
    assert!(out.status.success());
    assert_eq!(stdout(&out), "2-3-3-2-1  unimodal=true rank=9\n");
    assert!(String::from_utf8_lossy(&out.stderr).contains("rank_computations=0"));
}

#[test]
fn exhaustive_modes_agree() {
    let on = run(&["search", "--depth", "3", "--max-width", "5", "--mode", "exhaustive"]);
    let off = run(&["search", "--depth", "3", "--max-width", "5", "--mode", "exhaustive", "--no-pruning"]);
    assert_eq!(stdout(&on), "2-2-2-1  unimodal=true rank=5\n");
    assert_eq!(stdout(&on), stdout(&off));
}

#[test]
fn search_is_reproducible() {
    let args = ["search", "--depth", "5", "--max-width", "4", "--budget", "50", "--seed", "7", "--format", "csv"];
    assert_eq!(stdout(&run(&args)), stdout(&run(&args)));
}
