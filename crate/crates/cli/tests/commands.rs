use std::path::Path;
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn semicross(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_semicross")).args(args).output().expect("binary runs")
}

fn write(dir: &TempDir, name: &str, value: &Value) -> String {
    let path = dir.path().join(name);
    std::fs::write(&path, value.to_string()).unwrap();
    path.to_str().unwrap().to_string()
}

fn stdout_json(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("JSON on stdout")
}

fn real_matrix(rows: &[&[f64]]) -> Value {
    let data: Vec<[f64; 2]> = rows.iter().flat_map(|r| r.iter().map(|&x| [x, 0.0])).collect();
    json!({ "rows": rows.len(), "cols": rows[0].len(), "data": data })
}

fn matrix_from_json(v: &Value) -> Vec<Vec<(f64, f64)>> {
    let (rows, cols) = (v["rows"].as_u64().unwrap() as usize, v["cols"].as_u64().unwrap() as usize);
    let data = v["data"].as_array().unwrap();
    (0..rows)
        .map(|i| {
            (0..cols)
                .map(|j| {
                    let e = &data[i * cols + j];
                    (e[0].as_f64().unwrap(), e[1].as_f64().unwrap())
                })
                .collect()
        })
        .collect()
}

#[test]
fn commutant_of_a_jordan_block_is_lower_toeplitz() {
    let dir = TempDir::new().unwrap();
    let j = real_matrix(&[&[0.0, 0.0, 0.0], &[1.0, 0.0, 0.0], &[0.0, 1.0, 0.0]]);
    let path = write(&dir, "gens.json", &json!({ "ambient": 3, "generators": [j] }));
    let out = stdout_json(&semicross(&["commutant", "--generators", &path]));
    let basis = out["basis"].as_array().unwrap();
    assert_eq!(basis.len(), 3);
    for b in basis {
        let m = matrix_from_json(b);
        for i in 0..3 {
            for k in 0..3 {
                if i < k {
                    assert!(m[i][k].0.abs() < 1e-12 && m[i][k].1.abs() < 1e-12);
                }
                if i > 0 && k > 0 {
                    assert!((m[i][k].0 - m[i - 1][k - 1].0).abs() < 1e-12);
                    assert!((m[i][k].1 - m[i - 1][k - 1].1).abs() < 1e-12);
                }
            }
        }
    }
}

#[test]
fn toeplitz_two_has_one_defect_direction_under_every_method() {
    let dir = TempDir::new().unwrap();
    let eye = real_matrix(&[&[1.0, 0.0], &[0.0, 1.0]]);
    let shift = real_matrix(&[&[0.0, 0.0], &[1.0, 0.0]]);
    let path = write(&dir, "t2.json", &json!({ "ambient": 2, "basis": [eye, shift] }));
    for method in ["sampled", "rankone", "auto"] {
        let out = stdout_json(&semicross(&["ref", "--subspace", &path, "--method", method, "--seed", "3"]));
        assert_eq!(out["dim_s"], 2, "{method}");
        assert_eq!(out["defect_dim"], 1, "{method}");
        assert_eq!(out["certified_reflexive"], false, "{method}");
        assert_eq!(out["defect_basis"].as_array().unwrap().len(), 1);
    }
}

#[test]
fn corner_unit_is_certified() {
    let dir = TempDir::new().unwrap();
    let e00 = real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]);
    let path = write(&dir, "e00.json", &json!({ "ambient": 2, "basis": [e00] }));
    let out = stdout_json(&semicross(&["ref", "--subspace", &path]));
    assert_eq!(out["defect_dim"], 0);
    assert_eq!(out["certified_reflexive"], true);
}

#[test]
fn semicrossed_build_dimensions() {
    let dir = TempDir::new().unwrap();
    let scalar = write(&dir, "scalar.json", &json!({ "d": 1, "algebra_basis": [real_matrix(&[&[1.0]])], "w": real_matrix(&[&[1.0]]) }));
    let out = stdout_json(&semicross(&["semicrossed", "build", "--system", &scalar, "--levels", "4"]));
    assert_eq!(out["dim"], 4);
    assert_eq!(out["subspace"]["ambient"], 4);
    assert_eq!(out["form"], "w");

    let diag = json!({
        "d": 2,
        "algebra_basis": [real_matrix(&[&[1.0, 0.0], &[0.0, 0.0]]), real_matrix(&[&[0.0, 0.0], &[0.0, 1.0]])],
        "w": real_matrix(&[&[0.0, 1.0], &[1.0, 0.0]]),
    });
    let diag = write(&dir, "diag.json", &diag);
    for form in ["w", "beta"] {
        let out = stdout_json(&semicross(&["semicrossed", "build", "--system", &diag, "--levels", "3", "--form", form]));
        assert_eq!(out["dim"], 6, "{form}");
        assert_eq!(out["algebra_dim"], 2);
    }
}

#[test]
fn orbit_of_a_tail_into_a_two_cycle() {
    let dir = TempDir::new().unwrap();
    let sys = json!({ "points": ["a", "b", "c"], "phi": { "a": "b", "b": "c", "c": "b" }, "t": "a" });
    let path = write(&dir, "sys.json", &sys);
    let out_file = dir.path().join("orbit.json");
    let out = semicross(&["orbit", "--system", &path, "--levels", "6", "--out", out_file.to_str().unwrap()]);
    assert!(out.status.success());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(out_file).unwrap()).unwrap();
    assert_eq!(v["decomposition"]["n0"], 1);
    assert_eq!(v["decomposition"]["p"], 2);
    assert_eq!(v["structure"]["dim_tail"], 6);
    assert_eq!(v["structure"]["equal"], true);
}

#[test]
fn malformed_input_exits_two_and_names_the_path() {
    let dir = TempDir::new().unwrap();
    let bad = json!({ "ambient": 2, "generators": [{ "rows": 2, "cols": "two", "data": [] }] });
    let path = write(&dir, "bad.json", &bad);
    let out = semicross(&["commutant", "--generators", &path]);
    assert_eq!(out.status.code(), Some(2));
    let err = String::from_utf8_lossy(&out.stderr);
    assert!(err.contains("generators[0].cols"), "{err}");
}

#[test]
fn shape_errors_and_bad_arguments_exit_two() {
    let dir = TempDir::new().unwrap();
    let bad = json!({ "ambient": 2, "generators": [real_matrix(&[&[1.0]])] });
    let path = write(&dir, "shape.json", &bad);
    assert_eq!(semicross(&["commutant", "--generators", &path]).status.code(), Some(2));
    let scalar = write(&dir, "s.json", &json!({ "d": 1, "algebra_basis": [real_matrix(&[&[1.0]])], "w": real_matrix(&[&[1.0]]) }));
    assert_eq!(semicross(&["semicrossed", "build", "--system", &scalar, "--levels", "0"]).status.code(), Some(2));
    assert_eq!(semicross(&["verify", "no-such-suite"]).status.code(), Some(2));
    assert_eq!(semicross(&["commutant", "--generators", "/nonexistent/x.json"]).status.code(), Some(2));
}

fn read_reports(dir: &Path, suite: &str) -> Vec<Value> {
    let text = std::fs::read_to_string(dir.join(format!("{suite}.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn verify_writes_reports_to_the_configured_directory() {
    let dir = TempDir::new().unwrap();
    let out = Command::new(env!("CARGO_BIN_EXE_semicross"))
        .args(["verify", "reduced214", "--seed", "5"])
        .env("SEMICROSS_REPORT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "{}", String::from_utf8_lossy(&out.stdout));
    let reports = read_reports(dir.path(), "reduced214");
    assert_eq!(reports.len(), 4);
    for r in &reports {
        assert_eq!(r["tag"], "reduced214");
        assert_eq!(r["status"], "pass");
        assert_eq!(r["seeds"]["master"], 5);
    }
}

#[test]
fn verify_is_reproducible_and_seed_sensitive() {
    let run = |seed: &str| {
        let dir = TempDir::new().unwrap();
        let out = semicross(&["verify", "rem32", "--seed", seed, "--report-dir", dir.path().to_str().unwrap()]);
        assert_eq!(out.status.code(), Some(0));
        let mut reports = read_reports(dir.path(), "rem32");
        for r in &mut reports {
            r.as_object_mut().unwrap().remove("runtime_ms");
        }
        reports
    };
    assert_eq!(run("9"), run("9"));
    assert_ne!(run("9")[0]["seeds"], run("10")[0]["seeds"]);
}
