use std::path::Path;
use std::process::{Command, Output};

use serde_json::Value;

fn run(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mdregions"))
        .args(args)
        .env_remove("MDREGIONS_LOG")
        .output()
        .expect("binary runs")
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

const EXAMPLE: [&str; 10] = ["--d1", "0.1", "--d2", "0.15", "--d3", "0.2", "--d12", "0.05", "--d23", "0.08"];

fn with(cmd: &str, extra: &[&str]) -> Vec<String> {
    std::iter::once(cmd)
        .chain(EXAMPLE)
        .chain(extra.iter().copied())
        .map(String::from)
        .collect()
}

fn run_owned(args: &[String]) -> Output {
    run(&args.iter().map(String::as_str).collect::<Vec<_>>())
}

#[test]
fn three_region_document() {
    let out = run_owned(&with("three-region", &[]));
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["dimension"], 3);
    assert_eq!(v["halfspaces"].as_array().unwrap().len(), 5);
    assert_eq!(v["corner_points"].as_array().unwrap().len(), 6);
}

#[test]
fn out_of_range_distortion_is_a_usage_error() {
    let out = run(&["two-region", "--d1", "1.5", "--d2", "0.5", "--d12", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
    let v = json_of(&out);
    assert_eq!(v["error"]["kind"], "usage");
    assert!(v["error"]["message"].as_str().unwrap().contains("--d1"));
}

#[test]
fn unknown_flags_and_bad_numbers_are_rejected() {
    let out = run(&["two-region", "--d1", "0.5", "--d2", "0.5", "--d12", "0.3", "--bogus"]);
    assert_eq!(out.status.code(), Some(1));
    let out = run(&["two-region", "--d1", "x", "--d2", "0.5", "--d12", "0.3"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json_of(&out)["error"]["message"].as_str().unwrap().contains("malformed"));
    let out = run(&["two-region", "--d1", "0.5", "--d2", "0.5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn one_step_grid_is_rejected() {
    let out = run(&["regime-map", "--d1", "0.1", "--d2", "0.15", "--d3", "0.2", "--d12-steps", "1"]);
    assert_eq!(out.status.code(), Some(1));
    assert!(json_of(&out)["error"]["message"].as_str().unwrap().contains("--d12-steps"));
}

#[test]
fn domain_errors_exit_one_with_a_document() {
    // D12 above min(D1, D2)
    let out = run(&["three-region", "--d1", "0.1", "--d2", "0.15", "--d3", "0.2", "--d12", "0.12", "--d23", "0.1"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(json_of(&out)["error"]["kind"], "domain");
}

#[test]
fn interior_point_has_no_binding_constraints() {
    let out = run_owned(&with("membership", &["--rates", "3,3,3"]));
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["member"], true);
    assert_eq!(v["binding"], serde_json::json!([]));
}

#[test]
fn example_regime_map_has_2500_rows() {
    let out = run(&["regime-map", "--d1", "0.1", "--d2", "0.15", "--d3", "0.2", "--d12-steps", "50", "--d23-steps", "50"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(
        lines.next(),
        Some("d12,d23,label,d23_star,delta12_bits,delta23_bits,min_sum_rate_bits")
    );
    let rows: Vec<&str> = lines.collect();
    assert_eq!(rows.len(), 2500);
    assert!(rows.iter().any(|r| r.contains(",MinSumRate,")));
    // locale-independent decimals, at most 12 significant digits
    for cell in rows.iter().flat_map(|r| r.split(',')) {
        if let Ok(x) = cell.parse::<f64>() {
            let digits: String = cell.chars().filter(|c| c.is_ascii_digit()).collect();
            assert!(digits.trim_start_matches('0').len() <= 12, "{cell}");
            assert!(x.is_finite());
        }
    }
}

#[test]
fn all_constant_pmf_has_zero_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("pmf.json");
    std::fs::write(
        &path,
        r#"{"L":2,"roles":["X","V12","U1","U2","U12"],"alphabets":[1,1,1,1,1],"probs":[1.0]}"#,
    )
    .unwrap();
    let out = run(&["discrete-eval", "--pmf", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    let constraints = v["constraints"].as_array().unwrap();
    assert_eq!(constraints.len(), 4);
    assert!(constraints.iter().all(|c| c["bound_bits"] == 0.0));
}

fn membership_verdict(region_args: &[String], rates: &str) -> Value {
    let mut args = region_args.to_vec();
    args.extend(["--rates".into(), rates.into()]);
    json_of(&run_owned(&args))
}

#[test]
fn emitted_region_round_trips_through_membership() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("region.json");
    let out = run_owned(&with("three-region", &[]));
    std::fs::write(&path, &out.stdout).unwrap();
    let from_file = vec!["membership".to_string(), "--region".into(), path.to_str().unwrap().into()];
    let from_flags = with("membership", &[]);
    let region: Value = serde_json::from_slice(&out.stdout).unwrap();
    let mut points: Vec<String> = region["corner_points"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| {
            let r: Vec<String> = c["rates"].as_array().unwrap().iter().map(|x| x.to_string()).collect();
            r.join(",")
        })
        .collect();
    points.extend(["3,3,3", "0,0,0", "1.7,1.3,1.2", "1.6,1.5,1.2"].map(String::from));
    for p in &points {
        assert_eq!(membership_verdict(&from_file, p), membership_verdict(&from_flags, p), "{p}");
    }
}

#[test]
fn output_is_byte_stable() {
    let args = ["mc-validate", "--two", "--d1", "0.5", "--d2", "0.5", "--d12", "0.3", "--n", "20000", "--seed", "9"];
    assert_eq!(run(&args).stdout, run(&args).stdout);
    let corner = with("corner-points", &["--csv"]);
    assert_eq!(run_owned(&corner).stdout, run_owned(&corner).stdout);
}

#[test]
fn monte_carlo_validation_passes_and_fails_with_exit_codes() {
    let ok = run(&["mc-validate", "--d1", "0.1", "--d2", "0.15", "--d3", "0.2", "--d12", "0.05", "--n", "100000"]);
    assert_eq!(ok.status.code(), Some(0));
    let v = json_of(&ok);
    assert_eq!(v["pass"], true);
    assert_eq!(v["rate_bounds"]["pass"], true);
    assert_eq!(v["simulation"]["distortions"].as_array().unwrap().len(), 5);

    // a seed whose 10^4-sample run lands outside 3 standard errors
    let miss = run(&["mc-validate", "--two", "--d1", "0.5", "--d2", "0.5", "--d12", "0.3", "--n", "10000", "--seed", "134"]);
    assert_eq!(miss.status.code(), Some(2));
    assert_eq!(json_of(&miss)["pass"], false);
}

#[test]
fn swapped_outer_descriptions_are_handled() {
    let out = run(&["mc-validate", "--d1", "0.2", "--d2", "0.15", "--d3", "0.1", "--d12", "0.05", "--d23", "0.05", "--n", "20000"]);
    let v = json_of(&out);
    assert_eq!(v["swapped"], true);
    let out = run(&["corner-points", "--d1", "0.2", "--d2", "0.15", "--d3", "0.1", "--d12", "0.05", "--d23", "0.05"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v[0]["aux"]["base_outer"][0], 3);
}

#[test]
fn diagnostics_stay_off_stdout() {
    let args = ["two-region", "--d1", "0.5", "--d2", "0.5", "--d12", "0.3"];
    let quiet = run(&args);
    let loud = Command::new(env!("CARGO_BIN_EXE_mdregions"))
        .args(args)
        .env("MDREGIONS_LOG", "debug")
        .output()
        .unwrap();
    assert_eq!(quiet.stdout, loud.stdout);
    assert!(quiet.stderr.is_empty());
    assert!(!loud.stderr.is_empty());
    let v = json_of(&quiet);
    assert_eq!(v["params"]["rho12_star"], -0.142857142857);
}

#[test]
fn q_star_counts() {
    for (l, n) in [("2", 4), ("3", 18), ("4", 166)] {
        let v = json_of(&run(&["q-star", "--l", l]));
        assert_eq!(v["count"], n);
    }
    assert_eq!(run(&["q-star", "--l", "6"]).status.code(), Some(1));
}

#[test]
fn help_exits_zero() {
    let out = run(&["--help"]);
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(env!("CARGO_BIN_EXE_mdregions")).exists());
}
