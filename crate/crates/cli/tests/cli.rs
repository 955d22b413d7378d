use std::path::Path;
use std::process::{Command, Output};

use gvlab_core::volterra::affine_exact_formula;
use gvlab_core::Precision;

fn gvlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_gvlab"))
        .args(args)
        .env_remove("GVLAB_PRECISION_BITS")
        .output()
        .expect("binary runs")
}

fn stdout(o: &Output) -> String {
    String::from_utf8_lossy(&o.stdout).into_owned()
}

fn stderr(o: &Output) -> String {
    String::from_utf8_lossy(&o.stderr).into_owned()
}

fn read_csv(path: &Path) -> Vec<Vec<String>> {
    let mut r = csv::Reader::from_path(path).unwrap();
    r.records()
        .map(|rec| rec.unwrap().iter().map(String::from).collect())
        .collect()
}

fn out_arg(dir: &Path) -> String {
    dir.to_str().unwrap().to_string()
}

/// The run record minus its timing block, which is allowed to differ.
fn record_without_timing(path: &Path) -> serde_json::Value {
    let mut v: serde_json::Value = serde_json::from_slice(&std::fs::read(path).unwrap()).unwrap();
    v.as_object_mut().unwrap().remove("timing");
    v
}

#[test]
fn ingham_beta_zero_is_the_unit_sequence() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "solve",
        "--weight",
        "ingham",
        "--beta",
        "0",
        "--n",
        "10",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("solution.csv"));
    assert_eq!(rows.len(), 10);
    let a: Vec<f64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(a[0], 1.0);
    assert!(a[1..].iter().all(|&x| x == 0.0));
    let header = std::fs::read_to_string(dir.path().join("solution.csv")).unwrap();
    assert!(header.starts_with("n,a_n,A_n,n_a_n\n"));
    let rec: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("run.json")).unwrap()).unwrap();
    for key in ["config", "results", "residuals", "timing", "version"] {
        assert!(rec.get(key).is_some(), "run record lacks {key}");
    }
}

#[test]
fn affine_solve_matches_exact_formula() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "solve",
        "--weight",
        "affine:0.5,0.5",
        "--rhs",
        "n^0.5",
        "--n",
        "100",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("solution.csv"));
    let a100: f64 = rows[99][2].parse().unwrap();
    let exact: f64 = affine_exact_formula(100, Precision::F64).unwrap();
    assert!(
        (a100 - exact).abs() <= 1e-12 * exact.abs(),
        "{a100} vs {exact}"
    );
}

#[test]
fn empty_horizon_is_a_usage_error() {
    let o = gvlab(&["solve", "--weight", "ingham", "--beta", "0.5", "--n", "0"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("--n"));
}

#[test]
fn unknown_id_lists_the_catalog() {
    let o = gvlab(&[
        "solve",
        "--weight",
        "hyperbolic",
        "--beta",
        "0.5",
        "--n",
        "5",
    ]);
    assert_eq!(o.status.code(), Some(2));
    let e = stderr(&o);
    assert!(
        e.contains("ingham") && e.contains("gingham") && e.contains("liouville"),
        "{e}"
    );
}

#[test]
fn forced_high_precision_is_announced() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "solve",
        "--weight",
        "ingham",
        "--rhs",
        "n^-2000",
        "--n",
        "4",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success());
    assert!(stderr(&o).contains("forced high-precision path"));
}

#[test]
fn precision_bits_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = Command::new(env!("CARGO_BIN_EXE_gvlab"))
        .args([
            "solve",
            "--weight",
            "ingham",
            "--beta",
            "1/2",
            "--n",
            "5",
            "--out",
            &out_arg(dir.path()),
        ])
        .env("GVLAB_PRECISION_BITS", "128")
        .output()
        .unwrap();
    assert!(o.status.success());
    let rec: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("run.json")).unwrap()).unwrap();
    assert_eq!(rec["results"]["path"], "binary-128");
    assert_eq!(rec["config"]["precision_bits"], 128);
}

#[test]
fn mellin_eval_affine() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "mellin",
        "eval",
        "--weight",
        "affine:0.5,0.5",
        "--z",
        "-0.5",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("values.csv"));
    let v: f64 = rows[0][2].parse().unwrap();
    assert!((v - 4.0 / 3.0).abs() < 1e-14);
    assert_eq!(rows[0][3].parse::<f64>().unwrap(), 0.0);
}

#[test]
fn mellin_eval_grid() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "mellin",
        "eval",
        "--weight",
        "ingham",
        "--box",
        "-2,-1,1,2",
        "--grid",
        "3",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(read_csv(&dir.path().join("values.csv")).len(), 9);
}

#[test]
fn mellin_zeros_of_zeta_factor() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "mellin",
        "zeros",
        "--weight",
        "ingham",
        "--box",
        "0,1,0,30",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("zeros.csv"));
    assert_eq!(rows.len(), 3);
    for r in rows {
        assert!((r[0].parse::<f64>().unwrap() - 0.5).abs() < 1e-6);
    }
}

#[test]
fn mellin_zeros_off_the_line() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "mellin",
        "zeros",
        "--weight",
        "gingham:davenport_heilbronn",
        "--box",
        "0,1,0,100",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rows = read_csv(&dir.path().join("zeros.csv"));
    assert!(rows
        .iter()
        .any(|r| (r[0].parse::<f64>().unwrap() - 0.5).abs() > 1e-3 && r[3] == "1"));
}

#[test]
fn mellin_zeros_reject_integral_form() {
    let o = gvlab(&["mellin", "zeros", "--weight", "power:2", "--box", "0,1,0,3"]);
    assert_eq!(o.status.code(), Some(1));
    assert!(stderr(&o).contains("unsupported"));
}

#[test]
fn reproduce_eq1_and_remark52_pass() {
    let dir = tempfile::tempdir().unwrap();
    for target in ["eq1", "remark52"] {
        let o = gvlab(&["reproduce", target, "--out", &out_arg(dir.path())]);
        assert!(o.status.success(), "{}", stderr(&o));
        let s = stdout(&o);
        assert_eq!(
            s.lines().filter(|l| l.starts_with("PASS")).count(),
            1,
            "{s}"
        );
    }
    assert!(stdout(&gvlab(&[
        "reproduce",
        "remark52",
        "--out",
        &out_arg(dir.path())
    ]))
    .contains("= 8.0000000000"));
}

#[test]
fn reproduce_fig1_is_idempotent() {
    let dir = tempfile::tempdir().unwrap();
    let run = || {
        let o = gvlab(&["reproduce", "fig1", "--out", &out_arg(dir.path())]);
        assert!(o.status.success(), "{}", stderr(&o));
        assert!(stdout(&o).starts_with("PASS fig1"));
        let d = dir.path().join("fig1");
        (
            std::fs::read(d.join("fig1.svg")).unwrap(),
            std::fs::read(d.join("fig1.csv")).unwrap(),
            record_without_timing(&d.join("run.json")),
        )
    };
    let first = run();
    let second = run();
    assert_eq!(first, second);
    let svg = String::from_utf8(first.0).unwrap();
    assert!(svg.contains("<svg") && svg.contains("version=\"1.1\"") && svg.len() < 2 << 20);
}

#[test]
fn failing_check_sets_exit_code() {
    // too short for the fitted log-correction to land near -3/16
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "reproduce",
        "thm11",
        "--n",
        "50",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert_eq!(o.status.code(), Some(1), "{}", stdout(&o));
    assert!(stdout(&o).starts_with("FAIL thm11"));
}

#[test]
fn sequence_table() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "sequence",
        "--sequence",
        "liouville",
        "--n",
        "12",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success());
    let rows = read_csv(&dir.path().join("sequence.csv"));
    let v: Vec<i64> = rows.iter().map(|r| r[1].parse().unwrap()).collect();
    assert_eq!(v, [1, -1, -1, 1, -1, 1, -1, -1, 1, 1, -1, -1]);
}

#[test]
fn analyze_writes_report() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "analyze",
        "--weight",
        "ingham",
        "--beta",
        "0.25",
        "--n",
        "20000",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let rec: serde_json::Value =
        serde_json::from_slice(&std::fs::read(dir.path().join("analysis.json")).unwrap()).unwrap();
    assert_eq!(rec["results"]["hlr"]["verdict"], "consistent-with-hlr");
    let rel = rec["results"]["fit"]["relative_error"].as_f64().unwrap();
    assert!(rel < 0.05, "{rel}");
    assert!(dir.path().join("scaled.csv").exists());
}

#[test]
fn selftest_is_seeded() {
    let dir = tempfile::tempdir().unwrap();
    let o = gvlab(&[
        "selftest",
        "--seed",
        "11",
        "--n",
        "120",
        "--out",
        &out_arg(dir.path()),
    ]);
    assert!(o.status.success(), "{}", stdout(&o));
    assert_eq!(
        stdout(&o).lines().filter(|l| l.starts_with("PASS")).count(),
        8
    );
}

#[test]
fn list_catalog() {
    for args in [&["--list"][..], &["list"][..]] {
        let o = gvlab(args);
        assert!(o.status.success());
        let s = stdout(&o);
        assert!(
            s.contains("gingham") && s.contains("davenport_heilbronn") && s.contains("dh-zeros")
        );
    }
}
