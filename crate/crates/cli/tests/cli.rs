use std::process::{Command, Output};

use serde_json::Value;
use wigner_chaos::io::write_kernel;
use wigner_chaos::presets::random_mirror;
use wigner_chaos::{GridSpec, Kernel64};

fn wigner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_wigner")).args(args).env_remove("WIGNER_BUDGET").output().unwrap()
}

fn json_of(out: &Output) -> Value {
    serde_json::from_slice(&out.stdout).unwrap()
}

#[test]
fn pairings_counts() {
    let out = wigner(&["pairings", "--points", "8"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["all"], 105);
    assert_eq!(v["noncrossing"], 14);
    assert_eq!(v["provenance"]["tolerances"]["oracle"], 1e-10);
}

#[test]
fn pairings_guards() {
    assert_eq!(wigner(&["pairings", "--points", "7"]).status.code(), Some(2));
    assert_eq!(wigner(&["pairings", "--points", "18"]).status.code(), Some(2));
}

#[test]
fn deficit_of_diagonal_family() {
    let out = wigner(&["deficit", "--preset", "diagonal:16", "--cells", "16"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["deficit"], 0.0625);
    assert_eq!(v["violation"], false);
}

#[test]
fn stein_worked_example() {
    let out = wigner(&["stein", "--preset", "basis_power:2"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["delta_sq"], 2.0);
    assert!((v["bound_rhs"].as_f64().unwrap() - 2.828).abs() < 1e-3);
    assert_eq!(v["bounds_hold"], true);
}

#[test]
fn input_errors_exit_two() {
    assert_eq!(wigner(&["stein", "--preset", "nope:1"]).status.code(), Some(2));
    assert_eq!(wigner(&["deficit", "--preset", "diagonal:4", "--cells", "2"]).status.code(), Some(2));
    assert_eq!(wigner(&["deficit", "--kernel", "/nonexistent.json"]).status.code(), Some(2));
    assert_eq!(wigner(&["stein"]).status.code(), Some(2));
    assert_eq!(wigner(&["verify", "--family", "hermite"]).status.code(), Some(2));
    assert_eq!(wigner(&["pairings", "--points", "4", "--format", "csv"]).status.code(), Some(2));
    let over = Command::new(env!("CARGO_BIN_EXE_wigner"))
        .args(["moments", "--preset", "random_mirror:2:1", "--cells", "3"])
        .env("WIGNER_BUDGET", "5")
        .output()
        .unwrap();
    assert_eq!(over.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&over.stderr).contains("budget"));
}

#[test]
fn malformed_kernel_file() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    std::fs::write(&path, r#"{"grid":{"cells":2,"width":1.0},"order":2,"coeffs":[[1,0],[0,0],[0,0]]}"#).unwrap();
    let out = wigner(&["deficit", "--kernel", path.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&out.stderr).contains("coefficients"));
}

#[test]
fn kernel_file_and_output_path() {
    let dir = tempfile::tempdir().unwrap();
    let kpath = dir.path().join("f.json");
    let f: Kernel64 = random_mirror(GridSpec::unit(2).unwrap(), 3, 4).unwrap();
    write_kernel(&f, &kpath).unwrap();
    let rpath = dir.path().join("report.json");
    let out =
        wigner(&["moments", "--kernel", kpath.to_str().unwrap(), "--k", "4", "--output", rpath.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0));
    assert!(out.stdout.is_empty());
    let v: Value = serde_json::from_str(&std::fs::read_to_string(&rpath).unwrap()).unwrap();
    assert_eq!(v["order"], 3);
    assert_eq!(v["moments"].as_array().unwrap().len(), 4);
    assert!((v["moments"][1]["value"].as_f64().unwrap() - 1.0).abs() < 1e-12);
    assert_eq!(v["provenance"]["source"], kpath.to_str().unwrap());
}

#[test]
fn simulate_is_byte_identical_across_runs_and_threads() {
    let args = ["simulate", "--preset", "diagonal:4", "--dim", "48", "--trials", "3", "--seed", "9"];
    let a = wigner(&args);
    let b = Command::new(env!("CARGO_BIN_EXE_wigner")).args(args).env("RAYON_NUM_THREADS", "3").output().unwrap();
    assert_eq!(a.status.code(), Some(0));
    assert_eq!(a.stdout, b.stdout);
    let v = json_of(&a);
    assert_eq!(v["seed"], 9);
    assert_eq!(v["w2_trials"].as_array().unwrap().len(), 3);
    assert_eq!(v["provenance"]["dim"], 48);
}

#[test]
fn verify_csv_columns() {
    let out = wigner(&["verify", "--ks", "1,4", "--dim", "32", "--trials", "2"]);
    assert_eq!(out.status.code(), Some(0));
    let text = String::from_utf8(out.stdout.clone()).unwrap();
    let mut reader = csv::Reader::from_reader(text.as_bytes());
    let headers: Vec<String> = reader.headers().unwrap().iter().map(String::from).collect();
    assert_eq!(&headers[..7], ["k", "deficit", "delta_sq", "theorem_rhs", "w2_est", "w2_spread", "entropy_est"]);
    let rows: Vec<csv::StringRecord> = reader.records().map(Result::unwrap).collect();
    assert_eq!(rows.len(), 2);
    assert_eq!(&rows[1][0], "4");
    assert_eq!(rows[1][1].parse::<f64>().unwrap(), 0.25);
    assert_eq!(wigner(&["verify", "--ks", "1,4", "--dim", "32", "--trials", "2"]).stdout, out.stdout);
}

#[test]
fn verify_json_format() {
    let out = wigner(&["verify", "--ks", "2", "--dim", "32", "--trials", "1", "--format", "json"]);
    assert_eq!(out.status.code(), Some(0));
    let v = json_of(&out);
    assert_eq!(v["family"], "diagonal");
    assert_eq!(v["rows"][0]["k"], 2);
}
