use std::path::PathBuf;
use std::process::{Command, Output};

use serde_json::Value;

fn toricpo(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_toricpo")).args(args).output().expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn scratch(name: &str, contents: &str) -> PathBuf {
    let dir = std::env::temp_dir().join(format!("toricpo-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let p = dir.join(name);
    std::fs::write(&p, contents).unwrap();
    p
}

fn two_point_file() -> PathBuf {
    let o = toricpo(&["polytope", "example", "two_point_blowup", "--params", "2/5"]);
    assert_eq!(o.status.code(), Some(0));
    scratch("twoblow.json", &stdout(&o))
}

#[test]
fn potential_term_table() {
    let o = toricpo(&["potential", "--polytope", "example:cp1", "--u", "1/2"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("y^[1]  T^1/2"), "{s}");
    assert!(s.contains("y^[-1]  T^1/2"), "{s}");
}

#[test]
fn scan_row_interval_from_file() {
    let f = two_point_file();
    let o = toricpo(&["scan", "--polytope", f.to_str().unwrap(), "--step", "1/40", "--row", "u2=3/10"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("balanced run along u1: [13/40, 7/20] at (3/10)"), "{s}");
}

#[test]
fn repro_cases_report() {
    let o = toricpo(&["repro", "two-point-blowup-cases", "--alpha", "2/5", "--w", "1", "--kappa", "1/100"]);
    assert_eq!(o.status.code(), Some(0));
    let s = stdout(&o);
    assert!(s.contains("case 3 at u1=31/100; case 1 at u1=69/200"), "{s}");
    assert!(!s.contains("FAIL"));
}

#[test]
fn repro_all_passes() {
    let o = toricpo(&["repro", "all", "--json"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    assert_eq!(v["result"]["passed"], Value::Bool(true));
    assert_eq!(v["result"]["scenarios"].as_array().unwrap().len(), 6);
}

#[test]
fn json_reports_round_trip_byte_identical() {
    let runs: [&[&str]; 5] = [
        &["--json", "classify", "--polytope", "example:cpn:2", "--u", "1/4,1/4"],
        &["--json", "solve", "--polytope", "example:two_point_blowup:2/5", "--u", "13/40,3/10"],
        &["--json", "potential", "--polytope", "example:one_point_blowup_monotone", "--u", "1/3,1/3", "--bulk", r#"{"1":{"exp_b0":"-27/256"}}"#],
        &["--json", "lift", "point", "--polytope", "example:cp1", "--u", "1/2", "--solution", "-1", "--order", "2"],
        &["--json", "--mode", "float", "leading", "--polytope", "example:cpn:3", "--u", "1/4,1/4,1/4"],
    ];
    for args in runs {
        let o = toricpo(args);
        assert_eq!(o.status.code(), Some(0), "{args:?}");
        let text = stdout(&o);
        let v = toricpo_core::io::parse_report(&text).unwrap();
        assert_eq!(v["schema"], Value::from(1));
        assert_eq!(toricpo_core::io::canonical(&v) + "\n", text, "{args:?}");
    }
}

#[test]
fn bounds_in_both_unit_systems() {
    let o = toricpo(&["classify", "--polytope", "example:cpn:2", "--u", "1/4,1/4"]);
    let s = stdout(&o);
    assert!(s.contains("threshold: 1/4 (area units) = 1.570796 (physical)"), "{s}");
    let o = toricpo(&["classify", "--polytope", "example:cpn:2", "--u", "1/3,1/3"]);
    assert!(stdout(&o).contains(">= 4 for every Hamiltonian"));
}

#[test]
fn validation_errors_exit_one() {
    assert_eq!(toricpo(&["--bogus"]).status.code(), Some(1));
    let o = toricpo(&["classify", "--polytope", "example:cpn:2", "--u", "1/2,1/2"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(String::from_utf8_lossy(&o.stderr).contains("interior"));
    assert_eq!(toricpo(&["potential", "--polytope", "example:nosuch", "--u", "1/2"]).status.code(), Some(1));
    assert_eq!(toricpo(&["repro", "nosuch"]).status.code(), Some(1));
    let bad = scratch("bad.json", r#"{"n": 1, "facets": [{"v": [1], "lambda": "0"}, {"v": [-1], "lambda": "-1"}, {"v": [2], "lambda": "0"}]}"#);
    assert_eq!(toricpo(&["polytope", "validate", bad.to_str().unwrap()]).status.code(), Some(1));
    let o = toricpo(&["--help"]);
    assert_eq!(o.status.code(), Some(0));
    assert!(stdout(&o).contains("repro"));
}

#[test]
fn require_certified_sets_status_two() {
    // polytope files default to non-Fano, where the bulk lift is unavailable
    let f = scratch("cp1.json", r#"{"n": 1, "facets": [{"v": [1], "lambda": "0"}, {"v": [-1], "lambda": "-1"}], "name": "cp1"}"#);
    let args = ["classify", "--polytope", f.to_str().unwrap(), "--u", "1/2", "--lift-order", "1"];
    assert_eq!(toricpo(&args).status.code(), Some(0));
    let mut strict = args.to_vec();
    strict.push("--require-certified");
    assert_eq!(toricpo(&strict).status.code(), Some(2));
    // a certified empty solution set is a valid answer
    let o = toricpo(&["--require-certified", "solve", "--polytope", "example:cpn:2", "--u", "1/4,1/4"]);
    assert_eq!(o.status.code(), Some(0));
}

#[test]
fn lift_bulk_certificate() {
    let o = toricpo(&["--json", "lift", "bulk", "--polytope", "example:two_point_blowup:2/5", "--u", "13/40,3/10", "--order", "1"]);
    assert_eq!(o.status.code(), Some(0));
    let v: Value = serde_json::from_slice(&o.stdout).unwrap();
    let cert = &v["result"]["certificate"];
    assert_eq!(cert["certified"], Value::Bool(true));
    assert!(cert["monoid_used"].as_array().is_some_and(|a| !a.is_empty()));
}
