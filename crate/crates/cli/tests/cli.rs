//! End-to-end tests of the `cmnc` binary: argv contract, output formats,
//! exit codes, determinism, and the cache round-trip.

use std::process::{Command, Output};

fn cmnc(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_cmnc"))
        .args(args)
        .env_remove("CMNC_CACHE")
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).expect("utf-8 output")
}

#[test]
fn classnum_of_minus_23_is_3() {
    let out = cmnc(&["classnum", "--no-timestamp", "-23"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "3");
}

#[test]
fn hilbert_of_minus_4_prints_x_minus_1728() {
    let out = cmnc(&["hilbert", "--no-timestamp", "-4"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "X - 1728");
}

#[test]
fn hilbert_of_minus_15_prints_quadratic() {
    let out = cmnc(&["hilbert", "--no-timestamp", "-15"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).trim(), "X^2 + 191025X - 121287375");
}

#[test]
fn audit_constants_exits_zero_with_all_pass_table() {
    let out = cmnc(&["audit-constants", "--no-timestamp"]);
    assert!(out.status.success());
    let text = stdout(&out);
    assert!(text.contains("all pass: true"));
    assert!(!text.contains("FAIL"));
}

#[test]
fn audit_constants_json_is_machine_readable() {
    let out = cmnc(&["audit-constants", "--no-timestamp", "--format", "json"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["all_pass"], serde_json::Value::Bool(true));
    assert!(v["checks"].as_array().unwrap().len() >= 25);
}

#[test]
fn invalid_discriminant_is_a_usage_error() {
    let out = cmnc(&["classnum", "--no-timestamp", "-5"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn float_epsilon_is_rejected() {
    let out = cmnc(&[
        "count-eps",
        "--no-timestamp",
        "-8",
        "--tau",
        "-4",
        "--eps",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn json_errors_carry_a_reason_field() {
    let out = cmnc(&[
        "count-eps",
        "--no-timestamp",
        "--format",
        "json",
        "-8",
        "--tau",
        "-4",
        "--eps",
        "1e-3",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(v["error"], serde_json::Value::Bool(true));
    assert!(v["reason"].as_str().unwrap().contains("rational"));
}

#[test]
fn unwritable_cache_is_a_computation_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_cmnc"))
        .args(["hilbert", "--no-timestamp", "-23"])
        .env("CMNC_CACHE", "/dev/null/nope")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn count_eps_exact_zero_far_from_center() {
    let out = cmnc(&[
        "count-eps",
        "--no-timestamp",
        "--format",
        "json",
        "-8",
        "--tau",
        "-4",
        "--eps",
        "1/1000",
    ]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let r = &v["result"]["exact_count"];
    let r = if r.is_null() { &v["exact_count"] } else { r };
    assert_eq!(r.as_u64(), Some(0));
}

#[test]
fn tau_accepts_a_form_triple() {
    let out = cmnc(&[
        "count-eps",
        "--no-timestamp",
        "-8",
        "--tau",
        "1,0,2",
        "--eps",
        "1/1000",
    ]);
    assert!(out.status.success());
    assert!(stdout(&out).contains("count = 1"));
}

#[test]
fn j_rejects_form_of_wrong_discriminant() {
    let out = cmnc(&["j", "--no-timestamp", "-4", "--form", "1,1,6"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn identical_runs_are_byte_identical_without_timestamp() {
    for fmt in ["json", "csv", "text"] {
        let a = cmnc(&[
            "certify",
            "--no-timestamp",
            "--format",
            fmt,
            "--case",
            "3",
            "--alpha-disc",
            "-3",
            "--range",
            "-60..-4",
        ]);
        let b = cmnc(&[
            "certify",
            "--no-timestamp",
            "--format",
            fmt,
            "--case",
            "3",
            "--alpha-disc",
            "-3",
            "--range",
            "-60..-4",
        ]);
        assert!(a.status.success());
        assert_eq!(a.stdout, b.stdout, "format {fmt}");
    }
}

#[test]
fn timestamped_json_wraps_the_result() {
    let out = cmnc(&["classnum", "--format", "json", "-8"]);
    assert!(out.status.success());
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert!(v["timestamp"].is_number());
    assert_eq!(v["result"]["class_number"].as_u64(), Some(1));
}

#[test]
fn certify_rejects_mismatched_case_and_alpha() {
    let out = cmnc(&[
        "certify",
        "--no-timestamp",
        "--case",
        "2",
        "--alpha-disc",
        "-7",
        "--range",
        "-20..-4",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn cache_round_trips_across_processes() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        Command::new(env!("CARGO_BIN_EXE_cmnc"))
            .args(["hilbert", "--no-timestamp", "--format", "json", "-23"])
            .env("CMNC_CACHE", dir.path())
            .output()
            .unwrap()
    };
    let first = run();
    assert!(first.status.success());
    assert!(dir.path().join("hcp_23.txt").is_file());
    let second = run();
    let a: serde_json::Value = serde_json::from_slice(&first.stdout).unwrap();
    let v: serde_json::Value = serde_json::from_slice(&second.stdout).unwrap();
    // the residual is recompute metadata, not part of the polynomial
    assert_eq!(a["coeffs"], v["coeffs"]);
    assert_eq!(a["degree"], v["degree"]);
    assert_eq!(v["degree"].as_u64(), Some(3));
}

#[test]
fn threads_flag_is_accepted() {
    let out = cmnc(&["--threads", "2", "classnum", "--no-timestamp", "-23"]);
    assert!(out.status.success());
}
