use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use tempfile::TempDir;

fn lab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_szego-lab"))
        .args(args)
        .env_remove("SZEGO_LAB_THREADS")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn write(dir: &TempDir, name: &str, text: &str) -> PathBuf {
    let path = dir.path().join(name);
    std::fs::write(&path, text).unwrap();
    path
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn value(text: &str, key: &str) -> f64 {
    text.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("{key} missing in {text}"))
        .split(',')
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

const PAIR: &str = r#"{"pairs": [{"s": 1.0, "psi": 0.0}, {"s": 0.5, "psi": 0.0}]}"#;

#[test]
fn c1_prints_exact_values() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "pair1.json", PAIR);
    let o = lab(&["c1", "--data", s(&data)]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert_eq!(stdout(&o).trim(), "closed_form=1.5 lower_bound=1.5 eq4_bound=1.0");
}

#[test]
fn c1_with_angles_is_a_numerical_failure() {
    let dir = TempDir::new().unwrap();
    let data = write(
        &dir,
        "d.json",
        r#"{"pairs": [{"s": 1.0, "psi": 0.3}, {"s": 0.5, "psi": 0.0}]}"#,
    );
    let o = lab(&["c1", "--data", s(&data)]);
    assert_eq!(o.status.code(), Some(3));
    assert!(stderr(&o).contains("AnglesNotZero"));
}

#[test]
fn spectrum_of_rank_one_symbol() {
    let dir = TempDir::new().unwrap();
    let mut csv = String::from("n,re,im\n");
    for n in 0..200 {
        csv.push_str(&format!("{n},{:e},0\n", 0.75 * 0.5f64.powi(n)));
    }
    let coeffs = write(&dir, "geom.csv", &csv);
    let o = lab(&["spectrum", "--coeffs", s(&coeffs), "--M", "64"]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    assert!((value(&text, "rho") - 1.0).abs() < 1e-12, "{text}");
    assert!((value(&text, "sigma") - 0.5).abs() < 1e-12, "{text}");

    let out = dir.path().join("spec.csv");
    assert!(
        lab(&["spectrum", "--coeffs", s(&coeffs), "--M", "64", "--out", s(&out)])
            .status
            .success()
    );
    let table = std::fs::read_to_string(out).unwrap();
    assert!(table.starts_with("index,kind,value\n1,rho,"));
}

#[test]
fn malformed_data_exits_with_validation_code() {
    let dir = TempDir::new().unwrap();
    let data = write(
        &dir,
        "bad.json",
        r#"{"pairs": [{"s": 0.5, "psi": 0}, {"s": 0.7, "psi": 0}]}"#,
    );
    let o = lab(&["certify", "--data", s(&data)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(
        stderr(&o).contains("strict decrease violated at r=2"),
        "{}",
        stderr(&o)
    );

    let o = lab(&["reconstruct", "--data", s(&dir.path().join("missing.json"))]);
    assert_eq!(o.status.code(), Some(2));
    let o = lab(&["flow", "--data", s(&data), "--T", "1", "--dt", "-1"]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn reconstruct_then_spectrum_round_trips() {
    let dir = TempDir::new().unwrap();
    let data = write(
        &dir,
        "d.json",
        r#"{"pairs": [{"s": 1.0, "psi": 0.2}, {"s": 0.5, "psi": 1.0}, {"s": 0.2, "psi": -0.4}, {"s": 0.1, "psi": 3.0}]}"#,
    );
    let coeffs = dir.path().join("u.csv");
    let o = lab(&[
        "reconstruct",
        "--data",
        s(&data),
        "--modes",
        "128",
        "--out",
        s(&coeffs),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let o = lab(&["spectrum", "--coeffs", s(&coeffs), "--M", "128"]);
    let text = stdout(&o);
    let rho: Vec<f64> = text.lines().next().unwrap()["rho=".len()..]
        .split(',')
        .map(|x| x.parse().unwrap())
        .collect();
    assert_eq!(rho.len(), 2);
    assert!(
        (rho[0] - 1.0).abs() < 1e-9 && (rho[1] - 0.2).abs() < 1e-9,
        "{text}"
    );
}

#[test]
fn certify_reports_key_value_lines() {
    let dir = TempDir::new().unwrap();
    let data = write(
        &dir,
        "d.json",
        r#"{"pairs": [{"s": 1.0, "psi": 0}, {"s": 0.1, "psi": 0}, {"s": 0.01, "psi": 1}, {"s": 0.001, "psi": 2}]}"#,
    );
    let o = lab(&["certify", "--data", s(&data)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let text = stdout(&o);
    let keys: Vec<&str> = text.lines().map(|l| l.split('=').next().unwrap()).collect();
    assert_eq!(
        keys,
        [
            "delta",
            "l1_norm_c0inv_sum",
            "l1_norm_product",
            "bound_value",
            "c_delta_bound",
            "certified_radius"
        ]
    );
    assert!(value(&text, "l1_norm_product") <= value(&text, "bound_value"));
}

#[test]
fn flow_writes_trajectory_and_compares() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "pair.json", PAIR);
    let traj = dir.path().join("traj.csv");
    let o = lab(&[
        "flow",
        "--data",
        s(&data),
        "--T",
        "0.5",
        "--dt",
        "1e-3",
        "--modes",
        "64",
        "--out",
        s(&traj),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    let table = std::fs::read_to_string(traj).unwrap();
    let mut lines = table.lines();
    assert_eq!(lines.next(), Some("t,mass,h_half_norm,sv_drift_max"));
    assert_eq!(lines.count(), 11);

    let o = lab(&[
        "flow-compare",
        "--data",
        s(&data),
        "--T",
        "0.5",
        "--dt",
        "1e-3",
        "--modes",
        "64",
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(value(&stdout(&o), "discrepancy") < 1e-8);
}

#[test]
fn geometric_writes_four_reports() {
    let dir = TempDir::new().unwrap();
    let out = dir.path().join("geo");
    let o = lab(&[
        "geometric",
        "--h",
        "0.6931471805599453",
        "--theta",
        "0.5",
        "--z",
        "0,1",
        "--r",
        "0.95",
        "--N-max",
        "12",
        "--out",
        s(&out),
    ]);
    assert!(o.status.success(), "{}", stderr(&o));
    for name in ["index_profile", "stability", "gap", "routes"] {
        assert!(out.join(format!("{name}.csv")).exists(), "{name}");
    }
    let routes = std::fs::read_to_string(out.join("routes.csv")).unwrap();
    for line in routes.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert!(cells[5].parse::<f64>().unwrap() <= 1e-9, "{line}");
    }
    assert_eq!(routes.lines().count(), 13);

    let o = lab(&["geometric", "--h", "1", "--z", "-0.5,0", "--N-max", "3"]);
    assert!(o.status.success(), "{}", stderr(&o));
    assert!(stdout(&o).contains("# routes"));
    assert_eq!(lab(&["geometric", "--h", "-1"]).status.code(), Some(2));
}

fn sweep(args: &[&str], threads: &str) -> String {
    let o = Command::new(env!("CARGO_BIN_EXE_szego-lab"))
        .arg("sweep")
        .args(args)
        .env("SZEGO_LAB_THREADS", threads)
        .output()
        .unwrap();
    assert!(o.status.success(), "{}", stderr(&o));
    stdout(&o)
}

#[test]
fn sweep_output_is_sorted_by_key() {
    let text = sweep(&["--kind", "gamma", "--values", "0.7,0.2,0.5"], "2");
    let keys: Vec<f64> = text
        .lines()
        .skip(1)
        .map(|l| l.split(',').next().unwrap().parse().unwrap())
        .collect();
    assert_eq!(keys, vec![0.2, 0.5, 0.7]);
}

#[test]
fn gamma_sweep_satisfies_gap_inequality() {
    let seq = sweep(&["--kind", "gamma", "--values", "0.1:0.9:0.2"], "0");
    let par = sweep(&["--kind", "gamma", "--values", "0.1:0.9:0.2"], "3");
    assert_eq!(seq, par);
    let rows: Vec<Vec<f64>> = seq
        .lines()
        .skip(1)
        .map(|l| l.split(',').take(5).map(|x| x.parse().unwrap()).collect())
        .collect();
    assert_eq!(rows.len(), 5);
    assert!(rows.windows(2).all(|w| w[0][0] < w[1][0]));
    for r in &rows {
        assert!(r[3] >= r[4] - 1e-12 && r[4] > 0.0, "{r:?}");
    }
}

#[test]
fn empty_grid_gives_header_only() {
    let text = sweep(&["--kind", "delta", "--values", ""], "0");
    assert_eq!(
        text,
        "delta,N,l1_norm_c0inv_sum,l1_norm_product,bound_value,c_delta_bound,certified_radius,error\n"
    );
}

#[test]
fn delta_sweep_respects_bound_and_records_failures() {
    let text = sweep(
        &["--kind", "delta", "--values", "0.5,0.05,1.5,0.2", "--N", "8"],
        "2",
    );
    let rows: Vec<Vec<&str>> = text.lines().skip(1).map(|l| l.split(',').collect()).collect();
    assert_eq!(rows.len(), 4);
    assert!(rows[3][7].starts_with("InvalidInput"));
    for r in &rows[..3] {
        let norm: f64 = r[3].parse().unwrap();
        let bound: f64 = r[4].parse().unwrap();
        assert!(norm <= bound, "{r:?}");
    }
}

#[test]
fn run_config_dispatches_and_rejects_unknown_keys() {
    let dir = TempDir::new().unwrap();
    write(&dir, "pair.json", PAIR);
    let cfg = write(
        &dir,
        "run.json",
        r#"{"command": "reconstruct", "data": "pair.json", "M": 32, "out": "res"}"#,
    );
    let o = lab(&["run", "--config", s(&cfg)]);
    assert!(o.status.success(), "{}", stderr(&o));
    let coeffs = std::fs::read_to_string(dir.path().join("res/coeffs.csv")).unwrap();
    assert_eq!(coeffs.lines().count(), 33);

    let cfg = write(&dir, "c1.json", r#"{"command": "c1", "data": "pair.json"}"#);
    assert_eq!(
        stdout(&lab(&["run", "--config", s(&cfg)])).trim(),
        "closed_form=1.5 lower_bound=1.5 eq4_bound=1.0"
    );

    let bad = write(
        &dir,
        "bad.json",
        r#"{"command": "c1", "data": "pair.json", "tolerance": 1e-3}"#,
    );
    let o = lab(&["run", "--config", s(&bad)]);
    assert_eq!(o.status.code(), Some(2));
    assert!(stderr(&o).contains("tolerance"));
}

#[test]
fn outputs_are_bitwise_reproducible() {
    let dir = TempDir::new().unwrap();
    let data = write(&dir, "pair.json", PAIR);
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for out in [&a, &b] {
        assert!(lab(&[
            "reconstruct",
            "--data",
            s(&data),
            "--modes",
            "64",
            "--out",
            s(out)
        ])
        .status
        .success());
    }
    assert_eq!(std::fs::read(a).unwrap(), std::fs::read(b).unwrap());
}
