//! End-to-end runs of the `stokes-ext` binary.

use std::path::Path;
use std::process::{Command, Output};

fn stokes_ext(args: &[&str], out: &Path) -> Output {
    Command::new(env!("CARGO_BIN_EXE_stokes-ext"))
        .args(args)
        .arg("--out-dir")
        .arg(out)
        .env_remove("STOKES_EXT_OUT")
        .output()
        .expect("binary runs")
}

fn summary(out: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(out.join("summary.json")).unwrap()).unwrap()
}

fn any_flag_failed(s: &serde_json::Value) -> bool {
    s["flags"].as_array().unwrap().iter().any(|f| f["passed"] == false)
}

#[test]
fn alpha_one_exits_with_usage_error() {
    let dir = tempfile::tempdir().unwrap();
    let o = stokes_ext(&["--alpha", "1"], dir.path());
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("alpha must differ from 1"));
}

#[test]
fn stokes_conv_defaults_write_three_rows_and_orders() {
    let dir = tempfile::tempdir().unwrap();
    let o = stokes_ext(&["stokes-conv"], dir.path());
    let csv = std::fs::read_to_string(dir.path().join("rates.csv")).unwrap();
    assert_eq!(csv.lines().count(), 4, "{csv}");
    let s = summary(dir.path());
    let rates = &s["results"]["convergence"][0]["table"]["rates"];
    for norm in ["err_u_h1", "err_u_l2", "err_p_l2", "div_u_l2"] {
        assert!(rates[norm].get("least_squares").is_some(), "{norm}");
    }
    assert_eq!(s["thresholds_version"], 1);
    assert!(String::from_utf8_lossy(&o.stdout).starts_with("thresholds v1"));
    assert_eq!(o.status.code(), Some(if any_flag_failed(&s) { 1 } else { 0 }));
    for f in ["fields_scalar.csv", "fields_vector.csv"] {
        assert!(dir.path().join(f).exists());
    }
}

#[test]
fn exit_code_tracks_flags() {
    let dir = tempfile::tempdir().unwrap();
    let o = stokes_ext(&["poisson-conv", "--n", "8,16,32"], dir.path());
    assert!(!any_flag_failed(&summary(dir.path())));
    assert_eq!(o.status.code(), Some(0));
    let o = stokes_ext(&["stokes-conv", "--case", "bubble8"], dir.path());
    assert!(!any_flag_failed(&summary(dir.path())));
    assert_eq!(o.status.code(), Some(0));
    let o = stokes_ext(&["solvability-sweep", "--n", "4", "--alpha", "0", "--z-mode", "full"], dir.path());
    assert!(any_flag_failed(&summary(dir.path())));
    assert_eq!(o.status.code(), Some(1));
}

#[test]
fn outputs_are_deterministic() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["stokes-conv", "--n", "4,8,16", "--alpha", "0,2", "--seed", "11"];
    stokes_ext(&args, a.path());
    stokes_ext(&args, b.path());
    for f in ["rates.csv", "fields_scalar.csv", "fields_vector.csv"] {
        let read = |d: &Path| std::fs::read(d.join(f)).unwrap();
        assert_eq!(read(a.path()), read(b.path()), "{f}");
    }
    let spots = |d: &Path| summary(d)["results"]["spot_checks"].clone();
    assert_eq!(spots(a.path()), spots(b.path()));
}

#[test]
fn dump_system_dimensions_match_layout() {
    let dir = tempfile::tempdir().unwrap();
    let o = stokes_ext(&["dump-system", "--n", "2", "--z-mode", "full"], dir.path());
    assert_eq!(o.status.code(), Some(0));
    let layout = std::fs::read_to_string(dir.path().join("layout.txt")).unwrap();
    let total: usize = layout.lines().map(|l| l.split_whitespace().nth(2).unwrap().parse::<usize>().unwrap()).sum();
    let m = stokes_ext::SparseOperator::read_text(dir.path().join("system.mtxt")).unwrap();
    assert_eq!((m.rows(), m.cols()), (total, total));
    let rhs = std::fs::read_to_string(dir.path().join("rhs.txt")).unwrap();
    assert_eq!(rhs.lines().count(), total);
}
