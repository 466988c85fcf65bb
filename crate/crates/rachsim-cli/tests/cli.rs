//! End-to-end tests driving the compiled binary.

use std::path::Path;
use std::process::{Command, Output};

fn rachsim(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_rachsim")).args(args).output().expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

#[test]
fn analytic_single_scheme_plan() {
    let out = rachsim(&["--mode", "analytic", "--scheme", "2stepSDT", "--lambda-dp", "5", "--slots", "10"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 11, "header + 10 slots");
    assert!(lines[0].starts_with("scheme,receiver,lambda_dp,slot,engine,success_prob"));
    // Analytic rows leave both CI fields empty.
    let fields: Vec<&str> = lines[1].split(',').collect();
    assert_eq!(fields[4], "analytic");
    assert_eq!(fields[6], "");
    assert_eq!(fields[8], "");
}

#[test]
fn lambda_range_produces_grid() {
    let out = rachsim(&["--scheme", "4step", "--lambda-dp", "1:10:1", "--slots", "3"]);
    assert!(out.status.success());
    assert_eq!(stdout(&out).lines().count(), 1 + 10 * 3);
}

#[test]
fn intensity_figure_reports_last_slot_only() {
    let out = rachsim(&["--figure", "success_vs_intensity", "--scheme", "2step"]);
    assert!(out.status.success());
    let text = stdout(&out);
    let rows: Vec<&str> = text.lines().skip(1).collect();
    assert_eq!(rows.len(), 10, "10 intensities, slot 10 only");
    assert!(rows.iter().all(|r| r.split(',').nth(3) == Some("10")));
}

#[test]
fn usage_errors_exit_one() {
    for args in [
        vec!["--unknown-flag"],
        vec!["--lambda-dp", "10:1:1"],
        vec!["--lambda-dp", "1:2:3:4"],
        vec!["--slots", "0"],
        vec!["--mode", "simulate", "--reps", "0"],
        vec!["--scheme", "5step"],
    ] {
        let out = rachsim(&args);
        assert_eq!(out.status.code(), Some(1), "args {args:?}: {}", stderr(&out));
    }
}

#[test]
fn config_file_roundtrip_and_unknown_key() {
    let dir = std::env::temp_dir().join(format!("rachsim-cli-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let good = dir.join("good.toml");
    std::fs::write(&good, "lambda_dp = 2.0\nmu_new = 0.2\n").unwrap();
    let out = rachsim(&["--config", good.to_str().unwrap(), "--scheme", "4step", "--slots", "1"]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert!(stdout(&out).lines().nth(1).unwrap().starts_with("4step,advanced,2.00000,1,"));

    let bad = dir.join("bad.toml");
    std::fs::write(&bad, "lamda_dp = 2.0\n").unwrap();
    let out = rachsim(&["--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("lamda_dp"), "{}", stderr(&out));

    let missing = dir.join("missing.toml");
    let out = rachsim(&["--config", missing.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn simulate_rerun_is_byte_identical() {
    let args = [
        "--mode", "simulate", "--scheme", "2stepSDT", "--lambda-dp", "5", "--slots", "4",
        "--reps", "300", "--seed", "42",
    ];
    let a = rachsim(&args);
    let b = rachsim(&args);
    assert!(a.status.success());
    assert_eq!(stdout(&a), stdout(&b), "same seed must give identical CSV bytes");
    // Simulated rows carry CI fields.
    let text = stdout(&a);
    let fields: Vec<&str> = text.lines().nth(1).unwrap().split(',').collect();
    assert_eq!(fields[4], "sim");
    assert!(!fields[6].is_empty());
}

#[test]
fn out_directory_and_io_failure() {
    let dir = std::env::temp_dir().join(format!("rachsim-out-{}", std::process::id()));
    let out = rachsim(&["--scheme", "4step", "--slots", "2", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    let csv = std::fs::read_to_string(dir.join("results.csv")).unwrap();
    assert_eq!(csv.lines().count(), 3);

    let out = rachsim(&["--out", "/proc/definitely/not/writable"]);
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn compare_mode_within_tolerance_exits_zero() {
    // The 2-step schemes agree with the closed forms well inside the default
    // tolerances at these sample sizes.
    let out = rachsim(&[
        "--mode", "compare", "--scheme", "2step", "--lambda-dp", "5", "--slots", "5",
        "--reps", "3000", "--seed", "11",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let report = stderr(&out);
    assert!(report.contains("compare:"), "{report}");
    assert!(report.contains("0 failed"), "{report}");
    // Paired rows per cell.
    let csv = stdout(&out);
    let n_analytic = csv.lines().filter(|l| l.contains(",analytic,")).count();
    let n_sim = csv.lines().filter(|l| l.contains(",sim,")).count();
    assert_eq!(n_analytic, 5);
    assert_eq!(n_sim, 5);
}

#[test]
fn compare_mode_violation_exits_two() {
    // The 4-step SDT success probability deviates beyond 0.02 from slot 2 on
    // (documented capture-model approximation), so strict compare must flag
    // it and exit 2.
    let out = rachsim(&[
        "--mode", "compare", "--scheme", "4stepSDT", "--lambda-dp", "5", "--slots", "6",
        "--reps", "4000", "--seed", "11",
    ]);
    assert_eq!(out.status.code(), Some(2), "{}", stderr(&out));
    assert!(stderr(&out).contains("FAIL"));

    // A loosened success tolerance accepts the same data.
    let out = rachsim(&[
        "--mode", "compare", "--scheme", "4stepSDT", "--lambda-dp", "5", "--slots", "6",
        "--reps", "4000", "--seed", "11", "--tol-success", "0.06",
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
}

#[test]
fn tally_dump_is_line_delimited_json() {
    let dir = std::env::temp_dir().join(format!("rachsim-dump-{}", std::process::id()));
    std::fs::create_dir_all(&dir).unwrap();
    let path = dir.join("tallies.jsonl");
    let out = rachsim(&[
        "--mode", "simulate", "--scheme", "4step", "--slots", "3", "--reps", "5",
        "--seed", "2", "--dump-tallies", path.to_str().unwrap(), "--out", dir.to_str().unwrap(),
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    let text = std::fs::read_to_string(&path).unwrap();
    let lines: Vec<&str> = text.lines().collect();
    assert_eq!(lines.len(), 5 * 3, "one record per slot per replication");
    for line in lines {
        let v: serde_json::Value = serde_json::from_str(line).unwrap();
        assert!(v.get("active_devices").is_some());
        assert!(v.get("replication").is_some());
        assert_eq!(v.get("scheme").unwrap(), "4step");
    }

    // Tally dumps require a simulating mode.
    let out = rachsim(&["--mode", "analytic", "--dump-tallies", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn help_references_all_contract_flags() {
    let out = rachsim(&["--help"]);
    assert!(out.status.success());
    let text = stdout(&out);
    for flag in [
        "--mode", "--scheme", "--receiver", "--lambda-dp", "--slots", "--reps", "--seed",
        "--config", "--out", "--figure", "--pdp-mode", "--tol-success", "--dump-tallies",
    ] {
        assert!(text.contains(flag), "help missing {flag}");
    }
}

#[test]
fn waveform_mode_runs_end_to_end() {
    let out = rachsim(&[
        "--mode", "simulate", "--scheme", "2stepSDT", "--slots", "1", "--reps", "2",
        "--pdp-mode", "waveform", "--seed", "3",
    ]);
    assert!(out.status.success(), "{}", stderr(&out));
    assert_eq!(stdout(&out).lines().count(), 2);
}

#[test]
fn nonexistent_out_parent_is_created() {
    let dir = std::env::temp_dir()
        .join(format!("rachsim-nested-{}", std::process::id()))
        .join("a")
        .join("b");
    let out = rachsim(&["--scheme", "4step", "--slots", "1", "--out", dir.to_str().unwrap()]);
    assert!(out.status.success());
    assert!(Path::new(&dir.join("results.csv")).exists());
}
