//! End-to-end tests of the command line interface: argument handling, exit
//! codes, and the file formats it writes.

use std::fs;
use std::path::Path;
use std::process::{Command, Output};

fn hgauss(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_hgauss"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn stdout(out: &Output) -> String {
    String::from_utf8_lossy(&out.stdout).into_owned()
}

fn stderr(out: &Output) -> String {
    String::from_utf8_lossy(&out.stderr).into_owned()
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("no signal")
}

#[test]
fn catalog_lists_the_builtin_surfaces() {
    let out = hgauss(&["catalog"]);
    assert_eq!(code(&out), 0);
    let text = stdout(&out);
    for name in ["plane", "scherk", "rank1", "daniel", "vertical_plane", "cmc_vertical"] {
        assert!(text.contains(name), "missing {} in:\n{}", name, text);
    }
}

#[test]
fn eval_plane_emits_json_fields() {
    let out = hgauss(&[
        "eval",
        "--surface",
        "catalog:plane?a=0&b=0&c=0",
        "--at",
        "0.25,-0.5",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    assert_eq!(v["x"].as_f64().unwrap(), 0.25);
    assert_eq!(v["y"].as_f64().unwrap(), -0.5);
    assert!(v["H"].as_f64().unwrap().abs() <= 1e-14);
    assert_eq!(v["det_phi"].as_f64().unwrap(), 0.25);
}

#[test]
fn eval_text_prints_key_value_lines() {
    let out = hgauss(&["eval", "--surface", "catalog:scherk?k=1", "--at", "0,1"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    for key in ["x = ", "w = ", "H = ", "tau2 = "] {
        assert!(text.contains(key), "missing '{}' in:\n{}", key, text);
    }
}

#[test]
fn eval_handles_ruled_surfaces() {
    let out = hgauss(&[
        "eval",
        "--surface",
        "catalog:cmc_vertical?H=-0.5",
        "--at",
        "0.5,0",
        "--json",
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value = serde_json::from_str(&stdout(&out)).expect("valid JSON");
    let a = v["a"].as_f64().unwrap();
    assert!((a - (1.0 - 0.75f64.sqrt())).abs() <= 1e-12);
    assert!((v["H"].as_f64().unwrap().abs() - 0.5).abs() <= 1e-12);
}

#[test]
fn eval_accepts_negative_coordinates() {
    let out = hgauss(&["eval", "--surface", "catalog:plane", "--at", "-0.5,-0.25"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("x = -5.0000000000000000e-1"), "got:\n{}", text);
}

#[test]
fn eval_rejects_malformed_point() {
    let out = hgauss(&["eval", "--surface", "catalog:plane", "--at", "1"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("--at"));
}

#[test]
fn eval_rejects_unknown_catalog_name() {
    let out = hgauss(&["eval", "--surface", "catalog:nosuch", "--at", "0,0"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("catalog"));
}

fn read_lines(path: &Path) -> Vec<String> {
    fs::read_to_string(path)
        .expect("file written")
        .lines()
        .map(str::to_owned)
        .collect()
}

#[test]
fn grid_writes_deterministic_csv() {
    let dir = tempfile::tempdir().unwrap();
    let a = dir.path().join("a.csv");
    let b = dir.path().join("b.csv");
    for path in [&a, &b] {
        let out = hgauss(&[
            "grid",
            "--surface",
            "catalog:scherk?k=1",
            "--nx",
            "4",
            "--ny",
            "3",
            "--out",
            path.to_str().unwrap(),
        ]);
        assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    }
    let lines = read_lines(&a);
    assert_eq!(lines.len(), 1 + 4 * 3);
    assert!(lines[0].starts_with("x,y,f,"));
    for line in &lines[1..] {
        assert_eq!(line.split(',').count(), 18);
    }
    assert_eq!(fs::read(&a).unwrap(), fs::read(&b).unwrap());
}

#[test]
fn grid_honors_domain_flag_and_expression_refs() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = hgauss(&[
        "grid",
        "--surface",
        "expr:x*y/2+k*x?k=0.5",
        "--nx",
        "2",
        "--ny",
        "2",
        "--domain",
        "0,1,0,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let lines = read_lines(&path);
    assert_eq!(lines.len(), 5);
    let first: Vec<f64> = lines[1]
        .split(',')
        .map(|v| v.parse::<f64>().unwrap())
        .collect();
    assert_eq!((first[0], first[1]), (0.0, 0.0));
    // p = f_x + y/2 = k at the origin
    assert!((first[3] - 0.5).abs() <= 1e-15);
}

#[test]
fn grid_accepts_negative_domain_bounds() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.csv");
    let out = hgauss(&[
        "grid",
        "--surface",
        "catalog:scherk",
        "--nx",
        "2",
        "--ny",
        "2",
        "--domain",
        "-1,1,-1,1",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let lines = read_lines(&path);
    assert_eq!(lines.len(), 5);
    let first: Vec<f64> = lines[1]
        .split(',')
        .map(|v| v.parse::<f64>().unwrap())
        .collect();
    assert_eq!(first[0], -1.0);
    assert_eq!(first[1], -1.0);
}

#[test]
fn grid_uses_the_embedded_expression_domain() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("d.csv");
    let out = hgauss(&[
        "grid",
        "--surface",
        "expr:x*y/2?domain=-1,1,-3,3",
        "--nx",
        "2",
        "--ny",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let lines = read_lines(&path);
    let last: Vec<f64> = lines[4]
        .split(',')
        .map(|v| v.parse::<f64>().unwrap())
        .collect();
    assert_eq!((last[0], last[1]), (1.0, 3.0));
}

#[test]
fn grid_writes_json_when_asked() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("g.json");
    let out = hgauss(&[
        "grid",
        "--surface",
        "catalog:plane",
        "--nx",
        "2",
        "--ny",
        "2",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let v: serde_json::Value =
        serde_json::from_str(&fs::read_to_string(&path).unwrap()).expect("valid JSON");
    let rows = v.as_array().expect("array of rows");
    assert_eq!(rows.len(), 4);
    assert!(rows[0].get("H").is_some());
    assert!(rows[0].get("det_phi").is_some());
}

#[test]
fn grid_rejects_ruled_surfaces() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("x.csv");
    let out = hgauss(&[
        "grid",
        "--surface",
        "catalog:cmc_vertical?H=-0.5",
        "--nx",
        "3",
        "--ny",
        "3",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("graph"));
}

#[test]
fn grid_with_missing_arguments_is_a_usage_error() {
    let out = hgauss(&["grid", "--surface", "catalog:plane"]);
    assert_eq!(code(&out), 2);
}

#[test]
fn geodesic_traces_sinh_along_the_axis() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geo.csv");
    let out = hgauss(&[
        "geodesic",
        "--from",
        "0,0",
        "--dir",
        "1,0",
        "--tmax",
        "1",
        "--step",
        "0.001",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let lines = read_lines(&path);
    assert_eq!(lines[0], "t,u,v,du,dv");
    let last: Vec<f64> = lines
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse::<f64>().unwrap())
        .collect();
    assert_eq!(last[0], 1.0);
    assert!((last[1] - 1.0f64.sinh()).abs() <= 1e-9);
    assert!(last[2].abs() <= 1e-12);
}

#[test]
fn geodesic_accepts_negative_direction() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geo.csv");
    let out = hgauss(&[
        "geodesic",
        "--from",
        "0,0",
        "--dir",
        "-1,0",
        "--tmax",
        "1",
        "--step",
        "0.001",
        "--out",
        path.to_str().unwrap(),
    ]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let last: Vec<f64> = read_lines(&path)
        .last()
        .unwrap()
        .split(',')
        .map(|v| v.parse::<f64>().unwrap())
        .collect();
    assert!((last[1] + 1.0f64.sinh()).abs() <= 1e-9);
}

#[test]
fn geodesic_rejects_bad_arguments() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("geo.csv");
    let base = [
        "geodesic", "--from", "0,0", "--dir", "1,0", "--tmax", "1", "--step", "0.001",
    ];
    for (flag, value) in [("--tmax", "-1"), ("--step", "0"), ("--dir", "0,0")] {
        let mut args: Vec<&str> = base.to_vec();
        let at = args.iter().position(|a| *a == flag).unwrap();
        args[at + 1] = value;
        args.extend(["--out", path.to_str().unwrap()]);
        let out = hgauss(&args);
        assert_eq!(code(&out), 2, "{} {} should be rejected", flag, value);
    }
}

#[test]
fn check_suite_passes_and_prints_seed() {
    let out = hgauss(&["check", "--suite", "conformal"]);
    assert_eq!(code(&out), 0, "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("suite conformal  seed 1906"));
    assert!(text.contains("[PASS]"));
    assert!(!text.contains("[FAIL]"));
}

#[test]
fn check_rejects_unknown_suite() {
    let out = hgauss(&["check", "--suite", "nosuch"]);
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("unknown suite"));
}

#[test]
fn check_tolerance_override_forces_failure() {
    let out = hgauss(&["check", "--suite", "tension", "--tol", "1e-30"]);
    assert_eq!(code(&out), 1);
    assert!(stdout(&out).contains("[FAIL]"));
}

#[test]
fn check_seed_resolution_order() {
    let out = Command::new(env!("CARGO_BIN_EXE_hgauss"))
        .args(["check", "--suite", "equivariance"])
        .env("HGAUSS_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("seed 123"));

    let out = Command::new(env!("CARGO_BIN_EXE_hgauss"))
        .args(["check", "--suite", "equivariance", "--seed", "9"])
        .env("HGAUSS_SEED", "123")
        .output()
        .unwrap();
    assert_eq!(code(&out), 0);
    assert!(stdout(&out).contains("seed 9"));
}

#[test]
fn check_rejects_malformed_env_seed() {
    let out = Command::new(env!("CARGO_BIN_EXE_hgauss"))
        .args(["check", "--suite", "equivariance"])
        .env("HGAUSS_SEED", "not-a-number")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
    assert!(stderr(&out).contains("HGAUSS_SEED"));
}
