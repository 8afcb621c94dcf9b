use std::f64::consts::PI;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::{json, Value};
use tempfile::TempDir;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_strichartz"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().expect("binary runs")
}

fn code(out: &Output) -> i32 {
    out.status.code().expect("exited normally")
}

fn report(out: &Output) -> Value {
    assert!(out.status.success(), "stderr: {}", String::from_utf8_lossy(&out.stderr));
    serde_json::from_slice(&out.stdout).expect("stdout is JSON")
}

fn write_json(dir: &Path, name: &str, v: &Value) -> String {
    let p = dir.join(name);
    std::fs::write(&p, v.to_string()).unwrap();
    p.to_str().unwrap().to_string()
}

fn single_mode(dir: &Path) -> String {
    let a = 1.0 / (2.0 * PI).sqrt();
    write_json(dir, "single.json", &json!({"n_min": 3, "coeffs": [[a, 0.0]]}))
}

fn listing(dir: &Path) -> Vec<String> {
    let mut names: Vec<String> = std::fs::read_dir(dir)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    names.sort();
    names
}

fn out_dir(tmp: &TempDir, name: &str) -> (PathBuf, String) {
    let p = tmp.path().join(name);
    let s = p.to_str().unwrap().to_string();
    (p, s)
}

#[test]
fn eval_examples() {
    let tmp = TempDir::new().unwrap();
    let one = single_mode(tmp.path());
    let r = report(&run(&["eval", &one, "--B", "1"]));
    assert!((r["W"].as_f64().unwrap() - 1.0 / (2.0 * PI)).abs() < 1e-12);

    let a = 1.0 / (4.0 * PI).sqrt();
    let two = write_json(
        tmp.path(),
        "two.json",
        &json!({"n_min": 0, "coeffs": [[a, 0.0], [a, 0.0]]}),
    );
    let (dir, dir_s) = out_dir(&tmp, "eval");
    let r = report(&run(&["eval", &two, "--B", "1", "--out", &dir_s]));
    assert!((r["W"].as_f64().unwrap() - 3.0 / (4.0 * PI)).abs() < 1e-12);
    let d = &r["decomposition"];
    assert!((d["total"].as_f64().unwrap() - 3.0 / (4.0 * PI)).abs() < 1e-12);
    assert!(r["A"].is_number() && r["G"].is_number());
    assert_eq!(listing(&dir), ["eval.json", "manifest.json"]);
    let manifest: Value = serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["command"], "eval");
    assert_eq!(manifest["config"]["B"], 1.0);
    assert!(manifest["tool_version"].is_string());
    assert!(manifest["wall_time"].as_f64().unwrap() >= 0.0);
}

#[test]
fn eval_rejects_bad_input() {
    let tmp = TempDir::new().unwrap();
    let zero = write_json(tmp.path(), "zero.json", &json!({"n_min": 0, "coeffs": [[0.0, 0.0]]}));
    let out = run(&["eval", &zero, "--B", "1"]);
    assert_eq!(code(&out), 2);
    assert!(!out.stderr.is_empty());

    let bad = tmp.path().join("bad.json");
    std::fs::write(&bad, "{\"n_min\": 0,").unwrap();
    assert_eq!(code(&run(&["eval", bad.to_str().unwrap(), "--B", "1"])), 2);
    assert_eq!(code(&run(&["eval", "/nonexistent.json", "--B", "1"])), 2);
    let one = single_mode(tmp.path());
    assert_eq!(code(&run(&["eval", &one, "--B", "-1"])), 2);
    assert_eq!(code(&run(&["eval", &one, "--B", "abc"])), 2);
}

#[test]
fn threshold_family_1_is_deterministic() {
    let tmp = TempDir::new().unwrap();
    let (a, a_s) = out_dir(&tmp, "a");
    let (b, b_s) = out_dir(&tmp, "b");
    let r = report(&run(&["threshold", "--family", "1", "--seed", "3", "--out", &a_s]));
    assert!((r["threshold"].as_f64().unwrap() - 0.6958).abs() < 5e-4);
    let out = bin()
        .args(["threshold", "--family", "1", "--seed", "3", "--out", &b_s])
        .env("STRICHARTZ_THREADS", "1")
        .output()
        .unwrap();
    assert!(out.status.success());
    assert_eq!(listing(&a), ["manifest.json", "sweep.csv", "threshold.json"]);
    for f in ["sweep.csv", "threshold.json"] {
        assert_eq!(
            std::fs::read(a.join(f)).unwrap(),
            std::fs::read(b.join(f)).unwrap(),
            "{f}"
        );
    }
    let csv = std::fs::read_to_string(a.join("sweep.csv")).unwrap();
    let mut lines = csv.lines();
    assert_eq!(lines.next(), Some("B,family_id,max_A,param_1"));
    let bs: Vec<f64> = lines.map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(bs.len(), 400);
    assert!(bs.windows(2).all(|w| w[1] > w[0]));
}

#[test]
fn threshold_rejects_bad_parameters() {
    assert_eq!(code(&run(&["threshold", "--family", "5"])), 2);
    assert_eq!(code(&run(&["threshold", "--family", "1", "--scan-step", "0.5"])), 2);
    let out = bin()
        .args(["threshold", "--family", "1"])
        .env("STRICHARTZ_THREADS", "zero")
        .output()
        .unwrap();
    assert_eq!(code(&out), 2);
}

#[test]
fn optimize_regimes_and_determinism() {
    let tmp = TempDir::new().unwrap();
    let (dir, dir_s) = out_dir(&tmp, "opt");
    let first = run(&["optimize", "--B", "1", "--halfwidth", "2", "--out", &dir_s]);
    let r = report(&first);
    assert!(r["value"].as_f64().unwrap() > 1.0 / PI);
    assert_eq!(listing(&dir), ["manifest.json", "optimize.json", "trace.csv"]);
    let again = run(&["optimize", "--B", "1", "--halfwidth", "2"]);
    assert_eq!(first.stdout, again.stdout);
    assert_eq!(std::fs::read(dir.join("optimize.json")).unwrap(), first.stdout);

    let arg = &r["argmax"];
    let n_min = arg["n_min"].as_i64().unwrap();
    let coeffs: Vec<(f64, f64)> = arg["coeffs"]
        .as_array()
        .unwrap()
        .iter()
        .map(|c| (c[0].as_f64().unwrap(), c[1].as_f64().unwrap()))
        .collect();
    let mass: f64 = coeffs.iter().map(|(x, y)| x * x + y * y).sum();
    let centroid: f64 = coeffs
        .iter()
        .enumerate()
        .map(|(k, (x, y))| (n_min + k as i64) as f64 * (x * x + y * y))
        .sum::<f64>()
        / mass;
    assert!(centroid.abs() <= 0.5);
    let (re, im) = coeffs[(-n_min) as usize];
    assert!(re > 0.0 && im == 0.0);

    let trace = std::fs::read_to_string(dir.join("trace.csv")).unwrap();
    assert!(trace.starts_with("iteration,value\n0,"));

    let r = report(&run(&[
        "optimize",
        "--B",
        &PI.to_string(),
        "--halfwidth",
        "2",
        "--restarts",
        "4",
    ]));
    assert!(r["value"].as_f64().unwrap() < 1.0);
    assert_eq!(code(&run(&["optimize", "--B", "0"])), 2);
}

#[test]
fn simulate_single_mode_rotation() {
    let tmp = TempDir::new().unwrap();
    let one = single_mode(tmp.path());
    let (dir, dir_s) = out_dir(&tmp, "sim");
    let period = 2.0 * PI;
    let r = report(&run(&[
        "simulate",
        &one,
        "--L",
        &period.to_string(),
        "--horizon",
        "5",
        "--snapshot-stride",
        "100",
        "--reference",
        &one,
        "--out",
        &dir_s,
    ]));
    assert!(r["conserved_drift"]["P"].as_f64().unwrap() <= 1e-6);
    assert!(r["warning"].is_null());
    let c = 1.0 / period.sqrt();
    let omega = 8.0 * PI / period * c * c;
    let z = &r["final_state"]["coeffs"][0];
    let (re, im) = (z[0].as_f64().unwrap(), z[1].as_f64().unwrap());
    let (er, ei) = (c * (omega * 5.0).cos(), c * (omega * 5.0).sin());
    assert!(((re - er).powi(2) + (im - ei).powi(2)).sqrt() < 1e-6);
    assert_eq!(
        listing(&dir),
        [
            "final_state.json",
            "manifest.json",
            "simulate.json",
            "snapshots.json",
            "trajectory.csv"
        ]
    );
    let traj = std::fs::read_to_string(dir.join("trajectory.csv")).unwrap();
    let mut lines = traj.lines();
    assert_eq!(lines.next(), Some("t,H,P,orbit_distance"));
    assert_eq!(lines.count(), 501);
    let snaps: Value = serde_json::from_slice(&std::fs::read(dir.join("snapshots.json")).unwrap()).unwrap();
    assert_eq!(snaps.as_array().unwrap().len(), 6);
    assert_eq!(snaps[0]["state"]["L"], period);
}

#[test]
fn simulate_defaults_conserve_mass() {
    let tmp = TempDir::new().unwrap();
    let init = write_json(
        tmp.path(),
        "init.json",
        &json!({"L": 4.0, "n_min": -1, "coeffs": [[0.2, 0.1], [0.3, 0.0], [-0.1, 0.25]]}),
    );
    let r = report(&run(&["simulate", &init, "--strict"]));
    assert_eq!(r["steps"], 1000);
    assert!(r["conserved_drift"]["P"].as_f64().unwrap() <= 1e-6);
    assert!(r["conserved_drift"]["H"].as_f64().unwrap() <= 1e-6);
}

#[test]
fn simulate_strict_escalates() {
    let tmp = TempDir::new().unwrap();
    let init = write_json(
        tmp.path(),
        "big.json",
        &json!({"L": 2.0 * PI, "n_min": 0, "coeffs": [[3.0, 0.0], [2.0, 1.0]]}),
    );
    let (dir, dir_s) = out_dir(&tmp, "strict");
    let out = run(&[
        "simulate",
        &init,
        "--dt",
        "1",
        "--horizon",
        "5",
        "--strict",
        "--out",
        &dir_s,
    ]);
    assert_eq!(code(&out), 5);
    assert!(!dir.exists());
    let out = run(&["simulate", &init, "--dt", "1", "--horizon", "5"]);
    assert!(out.status.success());
    assert!(String::from_utf8_lossy(&out.stderr).contains("warning"));

    let no_period = single_mode(tmp.path());
    assert_eq!(code(&run(&["simulate", &no_period])), 2);
}

#[test]
fn stability_pipeline() {
    let tmp = TempDir::new().unwrap();
    let opt = report(&run(&[
        "optimize",
        "--B",
        "1",
        "--halfwidth",
        "8",
        "--restarts",
        "2",
        "--max-iters",
        "50000",
    ]));
    assert_eq!(opt["converged"], true);
    let gs = write_json(tmp.path(), "gs.json", &opt["argmax"]);
    let period = (2.0 * PI).to_string();
    let base = ["stability", &gs, "--L", &period, "--lambda", "0.5"];

    let r = report(&run(&[&base[..], &["--epsilon", "0"]].concat()));
    assert!(r["max_drift"].as_f64().unwrap() <= 1e-6);

    let (dir, dir_s) = out_dir(&tmp, "stab");
    let r = report(&run(&[
        &base[..],
        &["--epsilon", "1e-2", "--seed", "7", "--out", &dir_s],
    ]
    .concat()));
    let max_drift = r["max_drift"].as_f64().unwrap();
    assert!(max_drift.is_finite() && max_drift < 0.1);
    assert!(r["conserved_drift"][1].as_f64().unwrap() <= 1e-6);
    assert_eq!(listing(&dir), ["manifest.json", "orbit_distance.csv", "stability.json"]);
    let manifest: Value = serde_json::from_slice(&std::fs::read(dir.join("manifest.json")).unwrap()).unwrap();
    assert_eq!(manifest["seed"], 7);
    assert_eq!(manifest["config"]["epsilon"], 0.01);

    let a = 1.0 / (4.0 * PI).sqrt();
    let two = write_json(
        tmp.path(),
        "two.json",
        &json!({"n_min": 0, "coeffs": [[a, 0.0], [a, 0.0]]}),
    );
    assert_eq!(code(&run(&["stability", &two, "--L", &period, "--epsilon", "0.01"])), 6);
}
