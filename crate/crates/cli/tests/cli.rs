use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_poisson-interp"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn run_to(args: &[&str], path: &Path) -> Output {
    bin().args(args).arg("--output").arg(path).output().expect("binary runs")
}

#[test]
fn class_sup_emits_a_json_record() {
    let out = run(&["class-sup", "--alpha", "1", "--r", "0.5", "--beta", "0", "--p", "2", "--n", "8", "--x", "1.3"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    let row = &rows.as_array().unwrap()[0];
    for key in ["exact_p2", "dual_center", "dual_halfwidth", "mc_lower"] {
        assert!(row[key].is_f64(), "missing {key}: {row}");
    }
    let exact = row["exact_p2"].as_f64().unwrap();
    let upper = row["dual_center"].as_f64().unwrap() + row["dual_halfwidth"].as_f64().unwrap();
    let mc = row["mc_lower"].as_f64().unwrap();
    assert!(mc <= exact * (1.0 + 1e-9) && exact <= upper);
    assert!(mc >= 0.8 * exact);
}

#[test]
fn lebesgue_grid_is_csv_in_x_order() {
    let out = run(&["lebesgue", "--n", "20", "--x-grid", "0:6.2832:1000", "--no-header"]);
    assert!(out.status.success());
    let text = String::from_utf8(out.stdout).unwrap();
    let mut lines = text.lines();
    assert_eq!(lines.next(), Some("n,x,lebesgue,main_term"));
    let rows: Vec<Vec<f64>> = lines.map(|l| l.split(',').map(|v| v.parse().unwrap()).collect()).collect();
    assert_eq!(rows.len(), 1000);
    assert!(rows.windows(2).all(|w| w[0][1] < w[1][1]));
    assert!(rows.iter().all(|r| r[2] >= 1.0 - 1e-12 && (r[2] - r[3]).abs() < 3.0));
}

#[test]
fn reruns_are_byte_identical() {
    let dir = tempfile::tempdir().unwrap();
    let (a, b) = (dir.path().join("a.csv"), dir.path().join("b.csv"));
    let args = ["best-approx", "--n-range", "1:4", "--p", "inf", "--no-header"];
    assert!(run_to(&args, &a).status.success());
    assert!(run_to(&args, &b).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let args = ["class-sup", "--p", "1.5", "--n-range", "2:5", "--x-grid", "0.1:3:4", "--trials", "20"];
    let serial = bin()
        .args(args)
        .arg("--output")
        .arg(&a)
        .env("POISSON_INTERP_THREADS", "1")
        .output()
        .unwrap();
    assert!(serial.status.success());
    assert!(run_to(&args, &b).status.success());
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());
}

#[test]
fn header_line_is_optional() {
    let out = run(&["kernel", "--x", "0.5"]);
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.starts_with("# generated"));
    let out = run(&["kernel", "--x", "0.5", "--no-header"]);
    assert!(String::from_utf8(out.stdout).unwrap().starts_with("x,value,abs_err"));
}

#[test]
fn rows_are_ordered_by_n_then_x() {
    let out = run(&["interp", "--n-range", "2:4", "--x-grid", "0:3:3", "--format", "json"]);
    assert!(out.status.success());
    let rows: Vec<serde_json::Value> = serde_json::from_slice(&out.stdout).unwrap();
    let keys: Vec<(u64, f64)> = rows.iter().map(|r| (r["n"].as_u64().unwrap(), r["x"].as_f64().unwrap())).collect();
    assert_eq!(keys, vec![(2, 0.0), (2, 1.0), (2, 2.0), (3, 0.0), (3, 1.0), (3, 2.0), (4, 0.0), (4, 1.0), (4, 2.0)]);
}

#[test]
fn table_has_nine_cells() {
    let out = run(&["table", "--n", "64", "--p", "3", "--no-header"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert_eq!(text.lines().count(), 10);
    assert!(text.contains("r_lt1,p_in1_inf"));
    assert!(text.contains("r_gt1,p_eq_inf"));
}

#[test]
fn usage_errors_exit_with_two() {
    assert_eq!(run(&["lebesgue", "--x", "1"]).status.code(), Some(2));
    assert_eq!(run(&["lebesgue", "--n", "3", "--x-grid", "0:1"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "--x", "1", "--alpha", "-1"]).status.code(), Some(2));
    assert_eq!(run(&["kernel", "--x", "1", "--tol", "0"]).status.code(), Some(2));
    assert_eq!(run(&["frobnicate"]).status.code(), Some(2));
}

#[test]
fn numerical_failure_exits_with_three_and_a_record() {
    // the kernel series cannot be truncated to this accuracy
    let out = run(&["kernel", "--x", "1", "--alpha", "1e-3", "--r", "0.05", "--tol", "1e-300", "--format", "json"]);
    assert_eq!(out.status.code(), Some(3), "{}", String::from_utf8_lossy(&out.stderr));
    let rows: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(rows[0]["error"].is_string());
}

#[test]
fn verify_passes() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("verify.csv");
    let out = run_to(&["verify", "--tol", "1e-9", "--seed", "42", "--no-header"], &path);
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&path).unwrap();
    assert_eq!(text.lines().filter(|l| l.contains(",true,")).count(), 11);
}
