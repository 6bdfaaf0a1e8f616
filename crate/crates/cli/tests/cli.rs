use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

fn weight(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join(format!("../../weights/{name}.wspec"))
}

fn mbl(args: &[&str], w: &Path, out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_mbl"))
        .args(args)
        .arg("--weight")
        .arg(w)
        .arg("--out")
        .arg(out)
        .env("MBL_THREADS", "2")
        .output()
        .unwrap()
}

fn json(path: PathBuf) -> Value {
    serde_json::from_str(&std::fs::read_to_string(path).unwrap()).unwrap()
}

#[test]
fn moments_writes_table_and_pearson_residuals() {
    let dir = tempfile::tempdir().unwrap();
    let o = mbl(&["moments", "--nmax", "3"], &weight("classical_3_1_1"), dir.path());
    assert!(o.status.success());
    let m = json(dir.path().join("moments.json"));
    assert_eq!(m.as_array().unwrap().len(), 9);
    assert_eq!(m[0]["coeffs"][0][0][0], "13/12");
    assert!(dir.path().join("pearson_residuals.json").exists());
}

#[test]
fn mops_writes_exact_coefficients() {
    let dir = tempfile::tempdir().unwrap();
    let o = mbl(&["mops", "--nmax", "2"], &weight("scalar_a3_b1"), dir.path());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("coefficients.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,xi_left[0][0],eta_left[0][0],xi_right[0][0],eta_right[0][0],c_inv[0][0]");
    assert_eq!(lines[2], "1,-1/15,-1/36,-1/15,-1/36,-1/36");
    assert!(dir.path().join("mops.json").exists());
}

#[test]
fn verify_reports_and_selects_suites() {
    let dir = tempfile::tempdir().unwrap();
    let o = mbl(&["verify", "--nmax", "3", "--trunc", "4", "--suite", "mops", "--suite", "dpiv"], &weight("semiclassical_3_1_1"), dir.path());
    assert_eq!(o.status.code(), Some(0));
    let r = json(dir.path().join("report.json"));
    let suites = r["suites"].as_array().unwrap();
    assert_eq!(suites.len(), 2);
    assert!(suites.iter().any(|s| s["status"] == "skipped"));
    assert_eq!(r["summary"]["pass"], true);
}

#[test]
fn include_n0_adds_boundary_entries() {
    let count = |extra: &[&str]| {
        let dir = tempfile::tempdir().unwrap();
        let mut args = vec!["verify", "--nmax", "2", "--trunc", "4", "--suite", "zero-curvature"];
        args.extend_from_slice(extra);
        assert!(mbl(&args, &weight("classical_3_1_1"), dir.path()).status.success());
        json(dir.path().join("report.json")).to_string().matches("\"n\":0").count()
    };
    assert!(count(&["--include-n0"]) > count(&[]));
}

#[test]
fn errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    let o = mbl(&["verify", "--suite", "nonsense"], &weight("scalar_a3_b1"), dir.path());
    assert_eq!(o.status.code(), Some(2));
    let o = mbl(&["verify"], &dir.path().join("missing.wspec"), dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(json(dir.path().join("report.json"))["error"].is_string());
    let o = mbl(&["mops", "--trunc", "0"], &weight("scalar_a3_b1"), dir.path());
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn plot_writes_decimal_trajectories() {
    let dir = tempfile::tempdir().unwrap();
    let o = mbl(&["plot", "--nmax", "2", "--precision", "4", "--series", "xi,nu"], &weight("scalar_a3_b1"), dir.path());
    assert!(o.status.success());
    let csv = std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "n,xi[0][0],nu[0][0]");
    assert_eq!(lines[1], "0,-0.3333,0.5000");
    assert!(dir.path().join("plot_trajectories.py").exists());

    let o = mbl(&["plot", "--series", "nu"], &weight("semiclassical_3_1_1"), dir.path());
    assert!(o.status.success());
    assert_eq!(std::fs::read_to_string(dir.path().join("trajectories.csv")).unwrap().trim(), "n");
}
