//! End-to-end checks of the `usd` binary: exit codes, report round-trips,
//! and the documented command-line surface.

use std::io::Write;
use std::process::{Command, Output};

use tempfile::NamedTempFile;

use usd_cli::Report;

fn write_problem(text: &str) -> NamedTempFile {
    let mut file = NamedTempFile::new().expect("temp file");
    file.write_all(text.as_bytes()).expect("write problem");
    file
}

fn usd(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_usd"))
        .args(args)
        .output()
        .expect("binary runs")
}

const PURE_08: &str =
    r#"{"eta0": 0.5, "eta1": 0.5, "generator": {"name": "pure_pair", "overlap": 0.8}}"#;
const COUNTEREXAMPLE: &str =
    r#"{"eta0": 0.5, "eta1": 0.5, "generator": {"name": "counterexample"}}"#;

#[test]
fn analyze_saturated_problem_exits_zero() {
    let file = write_problem(PURE_08);
    let out = usd(&["analyze", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("q >= 0.8"), "unexpected report:\n{text}");
    assert!(text.contains("saturation: attainable"));
}

#[test]
fn analyze_unsaturated_problem_exits_two_with_report() {
    let file = write_problem(COUNTEREXAMPLE);
    let out = usd(&["analyze", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("NOT attainable"));
}

#[test]
fn malformed_file_exits_one() {
    let file = write_problem("{ this is not json");
    let out = usd(&["analyze", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    assert!(!out.stderr.is_empty());
    // Diagnostics go to stderr only; stdout stays clean for reports.
    assert!(out.stdout.is_empty());
}

#[test]
fn invalid_priors_exit_one() {
    let file = write_problem(
        r#"{"eta0": 0.7, "eta1": 0.7, "generator": {"name": "pure_pair", "overlap": 0.5}}"#,
    );
    let out = usd(&["analyze", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn invalid_tolerance_exits_one() {
    let file = write_problem(PURE_08);
    let out = usd(&[
        "analyze",
        file.path().to_str().unwrap(),
        "--tol-psd",
        "0.5",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn machine_report_round_trips_to_identical_scalars() {
    let file = write_problem(PURE_08);
    let out = usd(&[
        "analyze",
        file.path().to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();

    // The echoed problem is itself a problem file.
    let echo = serde_json::json!({
        "eta0": report.problem.eta0,
        "eta1": report.problem.eta1,
        "rho0": report.problem.rho0,
        "rho1": report.problem.rho1,
    });
    let refile = write_problem(&echo.to_string());
    let again = usd(&[
        "analyze",
        refile.path().to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(again.status.code(), Some(0));
    let reparsed: Report = serde_json::from_slice(&again.stdout).unwrap();

    let a = report.bounds.as_ref().unwrap();
    let b = reparsed.bounds.as_ref().unwrap();
    assert_eq!(a.q_bound, b.q_bound);
    assert_eq!(a.alpha, b.alpha);
    assert_eq!(a.helstrom_q, b.helstrom_q);
    assert_eq!(
        report.fidelity.as_ref().unwrap().fidelity,
        reparsed.fidelity.as_ref().unwrap().fidelity
    );
}

#[test]
fn ratio_flag_overrides_file_priors() {
    let file = write_problem(PURE_08);
    let out = usd(&[
        "analyze",
        file.path().to_str().unwrap(),
        "--ratio",
        "0.25",
        "--format",
        "machine",
    ]);
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert!((report.problem.eta0 - 0.8).abs() < 1e-12);
    assert!((report.problem.eta1 - 0.2).abs() < 1e-12);
}

#[test]
fn simulate_saturated_problem_reports_zero_errors() {
    let file = write_problem(PURE_08);
    let out = usd(&[
        "simulate",
        file.path().to_str().unwrap(),
        "--shots",
        "20000",
        "--seed",
        "5",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    let sim = report.simulation.unwrap();
    assert_eq!(sim.n_error, 0);
    assert_eq!(sim.shots, 20000);
    assert!((sim.empirical_q - sim.analytic_q).abs() <= 5.0 * sim.stderr_q);
}

#[test]
fn simulate_unsaturated_without_inline_povm_exits_two() {
    let file = write_problem(COUNTEREXAMPLE);
    let out = usd(&["simulate", file.path().to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn simulate_with_inline_always_fail_povm() {
    let identity2 = serde_json::json!([[[1.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [1.0, 0.0]]]);
    let zero2 = serde_json::json!([[[0.0, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.0, 0.0]]]);
    let spec = serde_json::json!({
        "eta0": 0.5, "eta1": 0.5,
        "generator": {"name": "pure_pair", "overlap": 0.8},
        "povm": {"e0": zero2, "e1": zero2, "e_inc": identity2}
    });
    let file = write_problem(&spec.to_string());
    let out = usd(&[
        "simulate",
        file.path().to_str().unwrap(),
        "--shots",
        "100",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    let sim = report.simulation.unwrap();
    assert_eq!(sim.empirical_q, 1.0);
    assert_eq!(sim.simulated_problem, "original");
}

#[test]
fn sweep_single_step_matches_analyze() {
    let file = write_problem(PURE_08);
    let sweep = usd(&[
        "sweep",
        file.path().to_str().unwrap(),
        "--ratio-min",
        "1.0",
        "--ratio-max",
        "1.0",
        "--steps",
        "1",
        "--format",
        "machine",
    ]);
    assert_eq!(sweep.status.code(), Some(0));
    let rows: Vec<usd_cli::SweepRow> = serde_json::from_slice(&sweep.stdout).unwrap();
    assert_eq!(rows.len(), 1);

    let analyze = usd(&[
        "analyze",
        file.path().to_str().unwrap(),
        "--format",
        "machine",
    ]);
    let report: Report = serde_json::from_slice(&analyze.stdout).unwrap();
    let bounds = report.bounds.unwrap();
    assert_eq!(rows[0].q_bound, bounds.q_bound);
    assert_eq!(rows[0].alpha, bounds.alpha);
    assert_eq!(rows[0].rudolph_bound, bounds.rudolph_bound);
    assert!(rows[0].saturated);
}

#[test]
fn sweep_rejects_bad_ranges() {
    let file = write_problem(PURE_08);
    let out = usd(&[
        "sweep",
        file.path().to_str().unwrap(),
        "--ratio-min",
        "2.0",
        "--ratio-max",
        "1.0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = usd(&[
        "sweep",
        file.path().to_str().unwrap(),
        "--ratio-min",
        "0.0",
    ]);
    assert_eq!(out.status.code(), Some(1));
    let out = usd(&[
        "sweep",
        file.path().to_str().unwrap(),
        "--steps",
        "0",
    ]);
    assert_eq!(out.status.code(), Some(1));
}

#[test]
fn sweep_text_has_documented_header() {
    let file = write_problem(PURE_08);
    let out = usd(&[
        "sweep",
        file.path().to_str().unwrap(),
        "--steps",
        "3",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout).unwrap();
    let header = text.lines().next().unwrap();
    assert!(header.starts_with("# ratio"));
    assert!(header.contains("q_bound"));
    assert!(header.contains("saturated"));
    assert_eq!(text.lines().count(), 4);
}

#[test]
fn oracle_reports_seed_and_gap() {
    let file = write_problem(PURE_08);
    let out = usd(&[
        "oracle",
        file.path().to_str().unwrap(),
        "--restarts",
        "6",
        "--seed",
        "9",
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    let oracle = report.oracle.unwrap();
    assert_eq!(oracle.seed, 9);
    assert_eq!(oracle.restarts, 6);
    assert!(oracle.gap_to_bound >= -1e-8);
    assert!(oracle.gap_to_bound <= 1e-2);

    // Same seed, same report.
    let rerun = usd(&[
        "oracle",
        file.path().to_str().unwrap(),
        "--restarts",
        "6",
        "--seed",
        "9",
        "--format",
        "machine",
    ]);
    assert_eq!(out.stdout, rerun.stdout);
}

#[test]
fn identical_states_are_a_degenerate_verdict() {
    let spec = serde_json::json!({
        "eta0": 0.5, "eta1": 0.5,
        "rho0": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]],
        "rho1": [[[0.5, 0.0], [0.0, 0.0]], [[0.0, 0.0], [0.5, 0.0]]]
    });
    let file = write_problem(&spec.to_string());
    let out = usd(&[
        "analyze",
        file.path().to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.degenerate.as_deref(), Some("fully_overlapping"));
    let povm = report.povm.unwrap();
    assert_eq!(povm.q, 1.0);
    assert_eq!(povm.lifted_q, 1.0);
}

#[test]
fn orthogonal_states_are_perfectly_distinguished() {
    let spec = serde_json::json!({
        "eta0": 0.5, "eta1": 0.5,
        "generator": {"name": "pure_pair", "overlap": 0.0}
    });
    let file = write_problem(&spec.to_string());
    let out = usd(&[
        "analyze",
        file.path().to_str().unwrap(),
        "--format",
        "machine",
    ]);
    assert_eq!(out.status.code(), Some(0));
    let report: Report = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report.degenerate.as_deref(), Some("zero_fidelity"));
    let povm = report.povm.unwrap();
    assert_eq!(povm.q, 0.0);
    let bounds = report.bounds.unwrap();
    assert_eq!(bounds.q_bound, 0.0);
}
