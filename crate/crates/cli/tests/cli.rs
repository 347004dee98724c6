//! End-to-end tests of the binary: exit codes, output schemas, round trips,
//! and batch determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> &'static str {
    env!("CARGO_BIN_EXE_mspectral")
}

fn run(args: &[&str]) -> Output {
    Command::new(bin()).args(args).output().expect("binary runs")
}

fn stdout_json(out: &Output) -> serde_json::Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is json")
}

fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../core/fixtures").join(name)
}

#[test]
fn validate_reports_flags_and_manifest() {
    let out = run(&["validate", fixture("b2.json").to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["m"], 3);
    assert_eq!(doc["report"]["flags"]["diagonal"], true);
    assert_eq!(doc["manifest"]["command"], "validate");
    assert!(doc["manifest"]["version"].is_string());
}

#[test]
fn validate_rejects_broken_file_with_exit_1() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"m":2,"n":2,"format":"coo","entries":[[1,1,1,2,1.0],[1,2,1,1,0.5]]}"#)
        .unwrap();
    let out = run(&["validate", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("error"), "stderr: {msg}");
}

#[test]
fn bounds_command_reproduces_reference_interval() {
    let out = run(&["bounds", fixture("b1.json").to_str().unwrap()]);
    let doc = stdout_json(&out);
    let lower = doc["report"]["best_lower"].as_f64().unwrap();
    let r1 = doc["report"]["r1"]["value"].as_f64().unwrap();
    assert!((lower - 26.1160).abs() < 1e-3);
    assert!((r1 - 26.5099).abs() < 1e-3);
}

#[test]
fn solve_emits_history_csv() {
    let dir = tempfile::tempdir().unwrap();
    let hist = dir.path().join("history.csv");
    let out = run(&[
        "solve",
        fixture("b1.json").to_str().unwrap(),
        "--shift",
        "es",
        "--tol",
        "1e-6",
        "--history-csv",
        hist.to_str().unwrap(),
    ]);
    let doc = stdout_json(&out);
    assert!((doc["result"]["lambda"].as_f64().unwrap() - 26.1188).abs() < 1e-2);
    let text = std::fs::read_to_string(&hist).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next().unwrap(), "iteration,lambda_shifted,lambda");
    let first = lines.next().unwrap();
    assert!(first.starts_with("0,"), "history starts at iteration 0: {first}");
}

#[test]
fn solve_with_bad_shift_is_a_usage_error() {
    let out = run(&["solve", fixture("b1.json").to_str().unwrap(), "--shift", "bogus"]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn solve_with_unavailable_shift_is_a_numeric_error() {
    let out = run(&["solve", fixture("ztensor2.json").to_str().unwrap(), "--shift", "es"]);
    assert_eq!(out.status.code(), Some(4));
    let msg = String::from_utf8_lossy(&out.stderr);
    assert!(msg.contains("es"), "stderr: {msg}");
}

#[test]
fn exact_applies_to_structured_and_refuses_generic() {
    let out = run(&["exact", fixture("equal_es4.json").to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["result"]["applicable"], true);
    assert!((doc["result"]["lambda"].as_f64().unwrap() - 106.9909).abs() < 1e-3);

    let out = run(&["exact", fixture("b1.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2), "generic tensor has no closed form");
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["result"]["applicable"], false);

    // negative entries skip the class route but still reach the
    // decomposition route, so this is "not applicable", not a failure
    let out = run(&["exact", fixture("ztensor2.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn structure_command_reports_classes() {
    let out = run(&["structure", fixture("b4.json").to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["delta2"], true);
    assert_eq!(doc["report"]["omega2"], true);
}

#[test]
fn certify_exit_codes_cover_all_verdicts() {
    // certified
    let out = run(&["certify", fixture("ztensor2.json").to_str().unwrap(), "--eta", "13"]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(doc["certificate"]["verdict"], "certified_strong_ellipticity");

    // not certified: b1 is nonnegative dense, not a Z-tensor
    let out = run(&["certify", fixture("b1.json").to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));

    // refuted: tiny diagonal, large negative off-diagonal orbit
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("refuted.json");
    std::fs::write(
        &path,
        r#"{"m":2,"n":2,"format":"coo","entries":[
            [1,1,1,1,0.1],[1,2,1,2,0.1],[2,1,2,1,0.1],[2,2,2,2,0.1],[1,1,2,2,-5.0]]}"#,
    )
    .unwrap();
    let out = run(&["certify", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn generate_output_revalidates_unchanged() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("gen.json");
    let out = run(&[
        "generate",
        "--family",
        "delta1",
        "--m",
        "3",
        "--n",
        "3",
        "--seed",
        "7",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["validate", path.to_str().unwrap()]);
    let doc = stdout_json(&out);
    assert_eq!(doc["report"]["flags"]["nonnegative"], true);
    // and the generated tensor admits the exact solution path
    let out = run(&["exact", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
}

#[test]
fn generate_is_byte_deterministic() {
    let a = run(&["generate", "--family", "kron", "--m", "3", "--n", "3", "--seed", "5"]);
    let b = run(&["generate", "--family", "kron", "--m", "3", "--n", "3", "--seed", "5"]);
    assert!(a.status.success());
    assert_eq!(a.stdout, b.stdout);
}

#[test]
fn figure_families_generate_and_solve() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("fig.json");
    let out = run(&[
        "generate",
        "--family",
        "figure:1",
        "--h",
        "2",
        "--size",
        "6",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    let out = run(&["solve", path.to_str().unwrap(), "--shift", "es", "--tol", "1e-6"]);
    let doc = stdout_json(&out);
    assert!(doc["result"]["converged"].as_bool().unwrap());
}

#[test]
fn oracle_command_matches_reference_value() {
    let out = run(&[
        "oracle",
        fixture("b4.json").to_str().unwrap(),
        "--seed",
        "3",
        "--restarts",
        "50",
    ]);
    let doc = stdout_json(&out);
    assert!((doc["result"]["lambda"].as_f64().unwrap() - 10.0).abs() < 1e-6);

    let out = run(&[
        "oracle",
        fixture("b4.json").to_str().unwrap(),
        "--seed",
        "3",
        "--grid-resolution",
        "100",
    ]);
    let doc = stdout_json(&out);
    assert!((doc["result"]["lambda"].as_f64().unwrap() - 10.0).abs() < 1e-4);
}

#[test]
fn compare_csv_has_exact_columns_and_is_deterministic() {
    let args = ["compare", "--count", "8", "--seed", "1"];
    let a = run(&args);
    let b = run(&args);
    assert!(a.status.success());
    let text_a = String::from_utf8(a.stdout).unwrap();
    let text_b = String::from_utf8(b.stdout).unwrap();
    let mut lines = text_a.lines();
    let manifest_line = lines.next().unwrap();
    assert!(manifest_line.starts_with("# manifest: "));
    assert_eq!(
        lines.next().unwrap(),
        "id,m,n,R1,R2,tau,tau1,tau2,lowerC,lowerD,bim_lambda,bim_iters,t_R_ms,t_tau_ms,t_tau1_ms,t_tau2_ms,t_bim_ms"
    );
    assert_eq!(lines.clone().count(), 8);
    // numeric fields (everything except wall-clock columns) are bit-identical
    let strip = |text: &str| -> Vec<String> {
        text.lines()
            .skip(2)
            .map(|l| l.split(',').take(12).collect::<Vec<_>>().join(","))
            .collect()
    };
    assert_eq!(strip(&text_a), strip(&text_b));
    // ordering sanity on each row: lowerC <= bim_lambda <= min(R1,R2)
    for row in text_a.lines().skip(2) {
        let cells: Vec<&str> = row.split(',').collect();
        let r1: f64 = cells[3].parse().unwrap();
        let r2: f64 = cells[4].parse().unwrap();
        let lower_c: f64 = cells[8].parse().unwrap();
        let lam: f64 = cells[10].parse().unwrap();
        assert!(lower_c <= lam + 1e-6);
        assert!(lam <= r1.min(r2) + 1e-6);
    }
}

#[test]
fn compare_with_jobs_flag_matches_serial_numeric_fields() {
    let serial = run(&["compare", "--count", "6", "--seed", "2"]);
    let parallel = run(&["compare", "--count", "6", "--seed", "2", "--jobs", "2"]);
    assert!(serial.status.success() && parallel.status.success());
    let strip = |out: &Output| -> Vec<String> {
        String::from_utf8_lossy(&out.stdout)
            .lines()
            .skip(2)
            .map(|l| l.split(',').take(12).collect::<Vec<_>>().join(","))
            .collect()
    };
    assert_eq!(strip(&serial), strip(&parallel));
}

#[test]
fn certify_scan_reports_the_smallest_eta() {
    let out = run(&[
        "certify",
        fixture("ztensor2.json").to_str().unwrap(),
        "--scan-eta",
        "16",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let doc: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let eta = doc["certificate"]["eta"].as_f64().unwrap();
    // the floor (13) already certifies, so the scan stops there
    assert!((eta - 13.0).abs() < 1e-12, "eta = {eta}");
}

#[test]
fn compare_reads_a_directory_of_tensors() {
    let dir = tempfile::tempdir().unwrap();
    for name in ["b1.json", "b2.json"] {
        std::fs::copy(fixture(name), dir.path().join(name)).unwrap();
    }
    let out = run(&["compare", "--dir", dir.path().to_str().unwrap()]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let rows: Vec<&str> = text.lines().skip(2).collect();
    assert_eq!(rows.len(), 2);
    assert!(rows[0].starts_with("b1,3,3,"));
    assert!(rows[1].starts_with("b2,3,3,"));
}

#[test]
fn out_flag_writes_the_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bounds.json");
    let out = run(&[
        "bounds",
        fixture("b2.json").to_str().unwrap(),
        "--out",
        path.to_str().unwrap(),
    ]);
    assert!(out.status.success());
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&path).unwrap()).unwrap();
    assert!((doc["report"]["best_upper"].as_f64().unwrap() - 10.0).abs() < 1e-9);
}
