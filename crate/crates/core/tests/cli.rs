use std::fs;
use std::path::Path;

use serde_json::Value;
use slowdiv::cli::run;

fn run_in(dir: &Path, args: &[&str]) -> i32 {
    let mut argv = vec!["slowdiv", "--out-dir", dir.to_str().unwrap()];
    argv.extend_from_slice(args);
    run(argv)
}

fn summary(dir: &Path, command: &str) -> Value {
    let text = fs::read_to_string(dir.join(format!("{command}_summary.json"))).unwrap();
    serde_json::from_str(&text).unwrap()
}

#[test]
fn sdi_segment_row_and_summary() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["sdi", "--from", "0.1", "--to", "0.3"]), 0);
    let csv = fs::read_to_string(dir.path().join("sdi.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(
        lines.next().unwrap(),
        "from[len],to[len],kind[-],value[1],abs_error[1],subdivisions[1],converged[-]"
    );
    let row: Vec<&str> = lines.next().unwrap().split(',').collect();
    let v: f64 = row[3].parse().unwrap();
    assert!((v - 0.16).abs() < 1e-10);
    let s = summary(dir.path(), "sdi");
    assert_eq!(s["inputs"]["args"]["from"], 0.1);
    assert_eq!(s["inputs"]["regularizer"], "tanh");
    assert_eq!(s["version"], env!("CARGO_PKG_VERSION"));
    assert!(s["timings"]["wallSeconds"].as_f64().unwrap() >= 0.0);
}

#[test]
fn two_fold_and_split_sum() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["sdi", "--from", "0", "--to", "0.3"]), 0);
    let s = summary(dir.path(), "sdi");
    assert_eq!(s["results"]["kind"], "twoFold");
    assert!((s["results"]["sdi"]["value"].as_f64().unwrap() - 0.18).abs() < 1e-9);
    assert_eq!(run_in(dir.path(), &["sdi", "--from", "-0.3", "--to", "0.3"]), 0);
    assert_eq!(summary(dir.path(), "sdi")["results"]["kind"], "splitSum");
}

#[test]
fn validation_errors_exit_with_two() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["sdi", "--from", "0.3", "--to", "0.1"]), 2);
    assert_eq!(run_in(dir.path(), &["sdi", "--from", "x", "--to", "0.1"]), 2);
    assert_eq!(run_in(dir.path(), &["--builtin", "nope", "classify", "--point", "0,0"]), 2);
    assert_eq!(run_in(dir.path(), &["simulate", "--eps", "0.5"]), 2);
    assert_eq!(run(["slowdiv", "--help"]), 0);
}

#[test]
fn model_file_errors_report_position() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.json");
    fs::write(&path, "{\n  \"schema\": \"pws-model/1\",\n  \"name\":\n}").unwrap();
    let err = slowdiv::models::ModelFile::load(&path).unwrap_err().to_string();
    assert!(err.contains("line 4") && err.contains("column"), "{err}");
    assert_eq!(run_in(dir.path(), &["--model", path.to_str().unwrap(), "classify", "--point", "0,0"]), 2);
}

#[test]
fn model_file_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let file = slowdiv::models::ModelFile::from_system("canonical", &slowdiv::models::canonical_vi3(), None).unwrap();
    let path = dir.path().join("model.json");
    fs::write(&path, serde_json::to_string(&file).unwrap()).unwrap();
    let m = path.to_str().unwrap();
    assert_eq!(run_in(dir.path(), &["--model", m, "classify", "--from", "-1", "--to", "1", "--n", "5"]), 0);
    let csv = fs::read_to_string(dir.path().join("classify.csv")).unwrap();
    assert!(csv.lines().nth(3).unwrap().ends_with("VI3"), "{csv}");
    assert_eq!(run_in(dir.path(), &["--model", m, "slow-relation"]), 2);
}

#[test]
fn orbit_then_dimension() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["--builtin", "tuned-simple", "orbit", "--s0", "0.1"]), 0);
    assert_eq!(summary(dir.path(), "orbit")["results"]["stopReason"], "floorReached");
    let seq = dir.path().join("orbit.csv");
    assert_eq!(run_in(dir.path(), &["dimension", "--sequence", seq.to_str().unwrap()]), 0);
    let s = summary(dir.path(), "dimension");
    assert_eq!(s["results"]["d"], 0.0);
    assert_eq!(s["results"]["cyclicity"]["bound"], 2);
    assert!(dir.path().join("dimension_fit.csv").exists());
}

#[test]
fn report_for_tuned_models() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(run_in(dir.path(), &["--builtin", "tuned-double", "report"]), 0);
    let s = summary(dir.path(), "report");
    assert_eq!(s["results"]["allPassed"], true);
    assert_eq!(s["results"]["cyclicity"]["bound"], 3);
}

#[test]
fn simulate_and_sweep_write_tables() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run_in(dir.path(), &["--builtin", "simulation", "simulate", "--lambda-tilde", "0.0086", "--trajectory-s", "0.001"]),
        0
    );
    let s = summary(dir.path(), "simulate");
    assert_eq!(s["results"]["cycles"].as_array().unwrap().len(), 1);
    assert!(fs::read_to_string(dir.path().join("trajectory.csv")).unwrap().starts_with("t[time],x[len],y[len]"));
    assert_eq!(
        run_in(dir.path(), &["--builtin", "simulation", "sweep", "--from", "0.0086", "--to", "0.0087", "--n", "5"]),
        0
    );
    let lstar = summary(dir.path(), "sweep")["results"]["saddleNode"]["lambdaStar"].as_f64().unwrap();
    assert!((lstar - 0.0086329).abs() < 2e-7, "{lstar}");
}

#[test]
fn numerical_failures_exit_with_three() {
    let dir = tempfile::tempdir().unwrap();
    assert_eq!(
        run_in(dir.path(), &["simulate", "--lambda-tilde", "0.1", "--trajectory-s", "0.05", "--t-max", "50"]),
        3
    );
}

#[test]
fn output_directory_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    std::env::set_var(slowdiv::cli::OUT_DIR_ENV, dir.path());
    assert_eq!(run(["slowdiv", "classify", "--point", "0.5,0"]), 0);
    std::env::remove_var(slowdiv::cli::OUT_DIR_ENV);
    assert!(dir.path().join("classify_summary.json").exists());
}
