use std::fs;
use std::path::Path;
use std::process::{Command, Output};

use jsonschema::JSONSchema;
use serde_json::Value;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cavity-store"))
}

fn run(dir: &Path, args: &[&str]) -> Output {
    bin().args(args).arg("--output").arg(dir).output().unwrap()
}

fn json(path: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(path).unwrap()).unwrap()
}

fn assert_schema(instance: &Value, schema_file: &str) {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("schemas").join(schema_file);
    let schema = json(&path);
    let compiled = JSONSchema::compile(&schema).expect("schema compiles");
    if let Err(errors) = compiled.validate(instance) {
        let msgs: Vec<String> = errors.map(|e| e.to_string()).collect();
        panic!("{schema_file}: {msgs:?}");
    };
}

fn first_line(path: &Path) -> String {
    fs::read_to_string(path).unwrap().lines().next().unwrap().to_string()
}

fn column(path: &Path, name: &str) -> Vec<f64> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    let idx = reader.headers().unwrap().iter().position(|h| h == name).unwrap();
    reader
        .records()
        .map(|r| r.unwrap()[idx].parse().unwrap())
        .collect()
}

#[test]
fn default_simulation_stores_the_pulse() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    assert!(String::from_utf8_lossy(&out.stdout).starts_with("simulate: efficiency="));

    let summary = json(&dir.path().join("trajectory.json"));
    assert_schema(&summary, "trajectory_summary.schema.json");
    assert!(summary["efficiency"].as_f64().unwrap() > 1.0 - 1e-6);
    assert!(summary["max_alpha_out"].as_f64().unwrap() <= 1e-6);
    assert_eq!(summary["plateau_ok"], true);

    let csv = dir.path().join("trajectory.csv");
    assert_eq!(first_line(&csv), "t,c_a,c_b,pop_b,alpha_in,alpha_out,g_eff");
}

#[test]
fn oracle_column_tracks_population() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--oracle", "--stride", "50"]);
    assert!(out.status.success());
    let csv = dir.path().join("trajectory.csv");
    assert!(first_line(&csv).ends_with(",pop_b_oracle"));
    let pop = column(&csv, "pop_b");
    let oracle = column(&csv, "pop_b_oracle");
    let worst = pop.iter().zip(&oracle).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(worst < 1e-6, "{worst:e}");
}

#[test]
fn coherent_sech_run_reports_photon_number() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["simulate", "--pulse", "sech", "--np", "5", "--format", "json"]);
    assert!(out.status.success());
    assert!(!dir.path().join("trajectory.csv").exists());
    let summary = json(&dir.path().join("trajectory.json"));
    assert_schema(&summary, "trajectory_summary.schema.json");
    assert!((summary["mean_photon_number"].as_f64().unwrap() - 5.0).abs() < 5e-6);
    assert_eq!(summary["n_p"], 5.0);
}

#[test]
fn coupling_outputs_and_magnitude() {
    let signed = tempfile::tempdir().unwrap();
    let magnitude = tempfile::tempdir().unwrap();
    assert!(run(signed.path(), &["coupling"]).status.success());
    assert!(run(magnitude.path(), &["coupling", "--magnitude"]).status.success());

    let sidecar = json(&signed.path().join("coupling.json"));
    assert_schema(&sidecar, "coupling_sidecar.schema.json");
    assert_eq!(sidecar["ok"], true);

    let csv = signed.path().join("coupling.csv");
    assert_eq!(first_line(&csv), "t,g");
    let g = column(&csv, "g");
    let abs_g = column(&magnitude.path().join("coupling.csv"), "g");
    assert!(g.iter().any(|&x| x < 0.0));
    assert!(g.iter().zip(&abs_g).all(|(a, b)| a.abs() == *b));
}

#[test]
fn tabulated_pulse_file() {
    let dir = tempfile::tempdir().unwrap();
    let (eta, peak): (f64, f64) = (8.0, 40.0);
    let norm = (std::f64::consts::PI.sqrt() * eta).sqrt();
    let mut text = String::from("t,amplitude\n");
    for i in 0..=1920 {
        let t = i as f64 * 0.05;
        let a = (-((t - peak) / eta).powi(2) / 2.0).exp() / norm;
        text.push_str(&format!("{t},{a:.15e}\n"));
    }
    let file = dir.path().join("pulse.csv");
    fs::write(&file, text).unwrap();
    let out = run(dir.path(), &["simulate", "--pulse", file.to_str().unwrap(), "--format", "json"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir.path().join("trajectory.json"));
    assert!(summary["efficiency"].as_f64().unwrap() > 1.0 - 1e-6);
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let out = bin()
        .args(["coupling", "--format", "json"])
        .env("CAVITY_STORE_OUT", dir.path())
        .output()
        .unwrap();
    assert!(out.status.success());
    assert!(dir.path().join("coupling.json").exists());
}

#[test]
fn sweep_outputs() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["sweep", "--axis", "amplitude", "--from", "0.9", "--to", "1.1", "--points", "5"]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let summary = json(&dir.path().join("sweep.json"));
    assert_schema(&summary, "sweep_summary.schema.json");
    assert_eq!(summary["points"], 5);
    let csv = dir.path().join("sweep.csv");
    assert_eq!(first_line(&csv), "axis_value,efficiency,residual,plateau_ok");
    let eff = column(&csv, "efficiency");
    assert_eq!(eff.len(), 5);
    assert_eq!(eff.iter().cloned().fold(f64::NEG_INFINITY, f64::max), eff[2]);
}

#[test]
fn fast_pulse_fails_with_diagnostic() {
    let dir = tempfile::tempdir().unwrap();
    let out = run(dir.path(), &["coupling", "--kappa-tp", "0.2"]);
    assert_eq!(out.status.code(), Some(3));
    let record: Value = serde_json::from_slice(&out.stderr).unwrap();
    assert_eq!(record["error"], "NegativeRadicand");
    assert!(record["range_end"].as_f64().unwrap() > record["range_start"].as_f64().unwrap());
    assert!(!dir.path().join("coupling.csv").exists());
}

#[test]
fn bad_arguments_exit_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run(dir.path(), &["simulate", "--g0", "-1"]).status.code(), Some(2));
    assert_eq!(bin().arg("transmogrify").output().unwrap().status.code(), Some(2));
    assert_eq!(bin().arg("--help").output().unwrap().status.code(), Some(0));
}

#[test]
fn reruns_are_byte_identical() {
    let (a, b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let args = ["simulate", "--g0", "1.1", "--stride", "25"];
    assert!(run(a.path(), &args).status.success());
    assert!(run(b.path(), &args).status.success());
    for name in ["trajectory.csv", "trajectory.json"] {
        assert_eq!(fs::read(a.path().join(name)).unwrap(), fs::read(b.path().join(name)).unwrap(), "{name}");
    }
}
