use std::path::Path;
use std::process::{Command, Output};

use drstokes::cli::report::{read_table, CheckStatus, VerificationReport};
use tempfile::TempDir;

fn drstokes(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_drstokes")).args(args).output().expect("binary runs")
}

fn run_to(dir: &Path, file: &str, args: &[&str]) -> (i32, Option<VerificationReport>) {
    let out = dir.join(file);
    let mut all: Vec<&str> = args.to_vec();
    let out_str = out.to_str().unwrap().to_string();
    all.extend(["--out", &out_str]);
    let status = drstokes(&all).status.code().expect("exit code");
    let report = out.exists().then(|| VerificationReport::load(&out).expect("report parses"));
    (status, report)
}

fn strip_timestamp(text: &str) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_str(text).unwrap();
    v.as_object_mut().unwrap().remove("timestamp");
    v
}

#[test]
fn default_algebra_run_passes() {
    let dir = TempDir::new().unwrap();
    let (code, report) = run_to(dir.path(), "alg.json", &["verify-algebra"]);
    let report = report.unwrap();
    assert_eq!(code, 0);
    assert_eq!(report.status, CheckStatus::Pass);
    assert!(report.first_failure.is_none());
    let passes = report.checks.iter().filter(|c| c.status == CheckStatus::Pass).count();
    assert!(passes >= 12, "{passes} PASS records");
    assert!(report.checks.iter().all(|c| !c.anchor.is_empty()));
}

#[test]
fn abstract_q1_includes_the_bilateral_record() {
    let dir = TempDir::new().unwrap();
    let (code, report) =
        run_to(dir.path(), "alg.json", &["verify-algebra", "--set", "q=1", "--set", "coefficients=abstract"]);
    assert_eq!(code, 0);
    let bilateral: Vec<_> = report.unwrap().checks.into_iter().filter(|c| c.anchor == "eq.bilateral.1q").collect();
    assert!(!bilateral.is_empty());
    assert!(bilateral.iter().all(|c| c.status == CheckStatus::Pass));
}

#[test]
fn corrupted_rules_fail_and_name_the_identity() {
    let dir = TempDir::new().unwrap();
    let (code, report) = run_to(dir.path(), "alg.json", &["verify-algebra", "--set", "test.corrupt_rules=true"]);
    let report = report.unwrap();
    assert_eq!(code, 1);
    assert_ne!(report.status, CheckStatus::Pass);
    let first = report.first_failure.expect("first failure named");
    assert!(report.checks.iter().any(|c| c.name == first && c.status != CheckStatus::Pass));
}

#[test]
fn tiny_rewrite_budget_is_stuck() {
    let dir = TempDir::new().unwrap();
    let (code, report) = run_to(dir.path(), "alg.json", &["verify-algebra", "--set", "q=1", "--set", "rewrite.budget=3"]);
    assert_eq!(code, 1);
    assert!(report.unwrap().checks.iter().any(|c| c.status == CheckStatus::Stuck));
}

#[test]
fn reports_are_deterministic_up_to_the_timestamp() {
    let dir = TempDir::new().unwrap();
    let args = ["verify-algebra", "--set", "n=3", "--set", "q=1,2"];
    run_to(dir.path(), "a.json", &args);
    run_to(dir.path(), "b.json", &args);
    let a = std::fs::read_to_string(dir.path().join("a.json")).unwrap();
    let b = std::fs::read_to_string(dir.path().join("b.json")).unwrap();
    assert_eq!(strip_timestamp(&a), strip_timestamp(&b));

    let mut par = args.to_vec();
    par.push("--parallel");
    run_to(dir.path(), "c.json", &par);
    let c = std::fs::read_to_string(dir.path().join("c.json")).unwrap();
    assert_eq!(strip_timestamp(&a), strip_timestamp(&c));
}

#[test]
fn configuration_errors_exit_with_two() {
    let dir = TempDir::new().unwrap();
    let cases: [&[&str]; 6] = [
        &["verify-algebra", "--set", "no.such.key=1"],
        &["verify-algebra", "--set", "coefficients=sometimes"],
        &["verify-kernels", "--set", "n=4"],
        &["verify-kernels", "--set", "n=3", "--set", "grid.base=300", "--set", "grid.levels=1"],
        &["reconstruct", "--set", "q=2"],
        &["no-such-command"],
    ];
    for args in cases {
        let (code, report) = run_to(dir.path(), "bad.json", args);
        assert_eq!(code, 2, "{args:?}");
        assert!(report.is_none(), "{args:?} wrote a report");
    }
}

#[test]
fn bad_thread_cap_is_a_configuration_error() {
    let out = Command::new(env!("CARGO_BIN_EXE_drstokes"))
        .args(["verify-algebra", "--set", "q=1"])
        .env("DRSTOKES_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn config_file_and_overrides() {
    let dir = TempDir::new().unwrap();
    let cfg = dir.path().join("alg.cfg");
    std::fs::write(&cfg, "# small run\nn = 2\nq = 1\ncoefficients = identity\n").unwrap();
    let cfg = cfg.to_str().unwrap();
    let (code, report) = run_to(dir.path(), "alg.json", &["verify-algebra", "--config", cfg, "--set", "n=3"]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    assert_eq!(report.config["n"], "3");
    assert_eq!(report.config["coefficients"], "identity");
}

#[test]
fn kernel_suite_passes_on_the_plane_and_fails_at_zero_tolerance() {
    let dir = TempDir::new().unwrap();
    let (code, report) = run_to(dir.path(), "k.json", &["verify-kernels", "--set", "n=2", "--set", "q=1"]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    for c in &report.checks {
        let orders: Vec<f64> =
            c.metrics.iter().filter(|(k, _)| k.starts_with("observed_order")).filter_map(|(_, v)| v.as_f64()).collect();
        assert!(!orders.is_empty(), "{}", c.name);
        assert!(orders.iter().all(|&p| p >= 1.5), "{}: {orders:?}", c.name);
    }

    let (code, report) =
        run_to(dir.path(), "k0.json", &["verify-kernels", "--set", "n=2", "--set", "q=1", "--set", "tol.residual=0"]);
    assert_eq!(code, 1);
    assert_eq!(report.unwrap().status, CheckStatus::Fail);
}

#[test]
fn reconstruction_table_schema_and_exterior_zeros() {
    let dir = TempDir::new().unwrap();
    let (code, report) = run_to(dir.path(), "rec.json", &["reconstruct", "--set", "n=2"]);
    assert_eq!(code, 0);
    let report = report.unwrap();
    assert_eq!(report.checks.len(), 3);
    assert!(report.checks.iter().all(|c| c.anchor.contains("eq.Green.Sqmu.2")));

    let csv = dir.path().join("rec.csv");
    let header = std::fs::read_to_string(&csv).unwrap().lines().next().unwrap().to_string();
    for column in ["point", "component", "reconstructed", "reference", "abs_err"] {
        assert!(header.split(',').any(|h| h == column), "missing {column}");
    }
    let rows = read_table(&csv).unwrap();
    assert_eq!(rows.len(), 3 * 20 * 3);
    let exterior: Vec<_> = rows.iter().filter(|r| r.region == "exterior").collect();
    assert_eq!(exterior.len(), 3 * 10 * 3);
    assert!(exterior.iter().all(|r| r.reference == 0.0 && r.abs_err <= 1e-3));
}

#[test]
fn merged_report_combines_and_fails_if_any_part_fails() {
    let dir = TempDir::new().unwrap();
    run_to(dir.path(), "good.json", &["verify-algebra", "--set", "q=1"]);
    run_to(dir.path(), "bad.json", &["verify-algebra", "--set", "q=1", "--set", "test.corrupt_rules=true"]);
    let good = dir.path().join("good.json");
    let bad = dir.path().join("bad.json");
    let (g, b) = (good.to_str().unwrap(), bad.to_str().unwrap());

    let (code, merged) = run_to(dir.path(), "m1.json", &["report-merge", g, g]);
    assert_eq!(code, 0);
    let single = VerificationReport::load(&good).unwrap();
    assert_eq!(merged.unwrap().checks.len(), 2 * single.checks.len());

    let (code, merged) = run_to(dir.path(), "m2.json", &["report-merge", g, b]);
    assert_eq!(code, 1);
    assert!(merged.unwrap().first_failure.is_some());
}
