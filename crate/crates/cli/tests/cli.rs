use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;

const TAU: f64 = std::f64::consts::TAU;

fn dwlab(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_dwlab"))
        .args(args)
        .env_remove("DWLAB_THREADS")
        .output()
        .expect("binary runs")
}

fn write_config(dir: &Path, name: &str, body: &Value) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, serde_json::to_string_pretty(body).unwrap()).unwrap();
    p
}

fn run(experiment: &str, config: &Path, out: &Path, extra: &[&str]) -> Output {
    let mut args = vec![experiment, "--config", config.to_str().unwrap(), "--out", out.to_str().unwrap()];
    args.extend_from_slice(extra);
    dwlab(&args)
}

fn read_json(p: &Path) -> Value {
    serde_json::from_str(&fs::read_to_string(p).unwrap()).unwrap()
}

fn circle_spectrum() -> Value {
    serde_json::json!({
        "experiment": "spectrum",
        "geometry": {"kind": "circle", "length": TAU, "n": 32},
        "damping": {"kind": "constant", "a0": 0.1}
    })
}

#[test]
fn spectrum_run_writes_listed_files() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &circle_spectrum());
    let out = dir.path().join("out");
    let o = run("spectrum", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    for f in ["spectrum.csv", "diagnostics.json", "manifest.json", "series.csv"] {
        assert!(out.join(f).is_file(), "{f} missing");
    }
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().next().unwrap(), "index,re_tau,im_tau,neg_im,cond_flag");
    assert_eq!(csv.lines().count(), 1 + 64);
    let diag = read_json(&out.join("diagnostics.json"));
    assert!((diag["gap"].as_f64().unwrap() - 0.1).abs() < 1e-9);
    assert_eq!(diag["band_ok"], true);

    let manifest = read_json(&out.join("manifest.json"));
    assert_eq!(manifest["status"], "ok");
    assert_eq!(manifest["experiment"], "spectrum");
    let files = manifest["files"].as_array().unwrap();
    assert_eq!(files.len(), 3);
    for f in files {
        let bytes = fs::read(out.join(f["name"].as_str().unwrap())).unwrap();
        assert_eq!(f["bytes"].as_u64().unwrap(), bytes.len() as u64);
        assert_eq!(f["sha256"].as_str().unwrap(), dwlab_cli::manifest::sha256_hex(&bytes));
    }
    assert_eq!(manifest["config_sha256"].as_str().unwrap().len(), 64);
}

#[test]
fn two_config_errors_are_both_reported() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = circle_spectrum();
    c["damping"]["a0"] = (-0.5).into();
    c["colour"] = "blue".into();
    let cfg = write_config(dir.path(), "bad.json", &c);
    let out = dir.path().join("out");
    let o = run("spectrum", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(2));
    let err = String::from_utf8_lossy(&o.stderr);
    assert!(err.contains("damping.a0"), "{err}");
    assert!(err.contains("colour: unknown key"), "{err}");
    assert!(!out.exists(), "validation failures must not touch the output");
}

#[test]
fn missing_matrix_file_is_a_validation_error() {
    let dir = tempfile::tempdir().unwrap();
    let mut c = circle_spectrum();
    c["geometry"] = serde_json::json!({"kind": "matrix", "path": "nowhere.mtx"});
    let cfg = write_config(dir.path(), "m.json", &c);
    let o = run("spectrum", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("geometry.path"));
}

#[test]
fn matrix_input_spectrum() {
    let dir = tempfile::tempdir().unwrap();
    // periodic second difference on 8 nodes, lower triangle
    let mut mtx = String::from("%%MatrixMarket matrix coordinate real symmetric\n8 8 16\n");
    for i in 1..=8 {
        mtx += &format!("{i} {i} -2\n");
    }
    for i in 1..8 {
        mtx += &format!("{} {i} 1\n", i + 1);
    }
    mtx += "8 1 1\n";
    fs::write(dir.path().join("lap.mtx"), mtx).unwrap();
    let mut c = circle_spectrum();
    c["geometry"] = serde_json::json!({"kind": "matrix", "path": "lap.mtx"});
    c["spectrum"] = serde_json::json!({"weyl_lambdas": [1.0]});
    let cfg = write_config(dir.path(), "m.json", &c);
    let out = dir.path().join("out");
    let o = run("spectrum", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let csv = fs::read_to_string(out.join("spectrum.csv")).unwrap();
    assert_eq!(csv.lines().count(), 17);
}

#[test]
fn decay_on_matrix_input_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    fs::write(dir.path().join("lap.mtx"), "%%MatrixMarket matrix coordinate real symmetric\n1 1 0\n").unwrap();
    let c = serde_json::json!({
        "geometry": {"kind": "matrix", "path": "lap.mtx"},
        "damping": {"kind": "constant", "a0": 0.1},
        "seed": 1
    });
    let cfg = write_config(dir.path(), "d.json", &c);
    let o = run("decay", &cfg, &dir.path().join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
}

#[test]
fn unwritable_output_fails_before_computing() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &circle_spectrum());
    let blocker = dir.path().join("file");
    fs::write(&blocker, "x").unwrap();
    let o = run("spectrum", &cfg, &blocker.join("out"), &[]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("not writable"));
}

#[test]
fn stage_failure_keeps_partial_artifacts() {
    let dir = tempfile::tempdir().unwrap();
    let c = serde_json::json!({
        "geometry": {"kind": "doubling"},
        "seed": 1,
        "spectrum": {"dense_cap": 16},
        "spectrum_geometry": {"kind": "circle", "length": TAU, "n": 32},
        "pressure": {
            "estimator": "separated", "epsilons": [0.0625], "horizons": [4],
            "samples": 4096, "observable": {"kind": "constant", "value": 0.0}
        }
    });
    let cfg = write_config(dir.path(), "v.json", &c);
    let out = dir.path().join("out");
    let o = run("verify-gap", &cfg, &out, &[]);
    assert_eq!(o.status.code(), Some(3), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(out.join("pressure.csv").is_file());
    let m = read_json(&out.join("manifest.json"));
    assert_eq!(m["status"], "failed");
    assert!(m["error"].as_str().unwrap().contains("dense solver cap"));
    let names: Vec<&str> = m["files"].as_array().unwrap().iter().map(|f| f["name"].as_str().unwrap()).collect();
    assert!(names.contains(&"pressure.csv") && names.contains(&"gap.json"));
    let failed: Vec<&Value> = m["stages"].as_array().unwrap().iter().filter(|s| s["status"] == "failed").collect();
    assert_eq!(failed.len(), 1);
    assert_eq!(failed[0]["name"], "spectrum");
}

fn decay_config() -> Value {
    serde_json::json!({
        "geometry": {"kind": "circle", "length": TAU, "n": 32},
        "damping": {"kind": "constant", "a0": 0.1},
        "decay": {"horizon": 60, "dt_out": 0.5, "stats_horizon": 20, "stats_samples": 200}
    })
}

#[test]
fn decay_energy_is_ascending_and_runs_are_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d.json", &decay_config());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    for (out, threads) in [(&a, "1"), (&b, "3")] {
        let o = run("decay", &cfg, out, &["--seed", "11", "--threads", threads]);
        assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    }
    let energy = fs::read_to_string(a.join("energy.csv")).unwrap();
    let t: Vec<f64> = energy.lines().skip(1).map(|l| l.split(',').next().unwrap().parse().unwrap()).collect();
    assert_eq!(t.len(), 121);
    assert!(t.windows(2).all(|w| w[1] > w[0]));
    for f in ["energy.csv", "decay.json", "series.csv"] {
        assert_eq!(fs::read(a.join(f)).unwrap(), fs::read(b.join(f)).unwrap(), "{f} differs");
    }
    let report = read_json(&a.join("decay.json"));
    assert!((report["fitted_rate"].as_f64().unwrap() - 0.2).abs() < 0.01);
    assert_eq!(read_json(&a.join("manifest.json"))["seed"], 11);
}

#[test]
fn different_seeds_change_the_data() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "d.json", &decay_config());
    let (a, b) = (dir.path().join("a"), dir.path().join("b"));
    assert!(run("decay", &cfg, &a, &["--seed", "1"]).status.success());
    assert!(run("decay", &cfg, &b, &["--seed", "2"]).status.success());
    assert_ne!(fs::read(a.join("energy.csv")).unwrap(), fs::read(b.join("energy.csv")).unwrap());
}

#[test]
fn torus_strip_decay_flags_missing_control() {
    let dir = tempfile::tempdir().unwrap();
    let c = serde_json::json!({
        "geometry": {"kind": "torus", "lx": TAU, "ly": TAU, "nx": 12, "ny": 12},
        "damping": {"kind": "smoothed_strip", "center": 1.0, "width": 1.5, "a0": 0.5, "smoothing": 0.5},
        "seed": 5,
        "decay": {"horizon": 20, "stats_horizon": 20, "stats_samples": 200}
    });
    let cfg = write_config(dir.path(), "t.json", &c);
    let out = dir.path().join("out");
    let o = run("decay", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let r = read_json(&out.join("decay.json"));
    assert_eq!(r["c_inf"].as_f64().unwrap(), 0.0);
    assert_eq!(r["resolution_dependent"], true);
}

#[test]
fn pressure_trajectories_have_the_declared_columns() {
    let dir = tempfile::tempdir().unwrap();
    let c = serde_json::json!({
        "geometry": {"kind": "bolza"},
        "damping": {"kind": "constant", "a0": 0.8},
        "seed": 2,
        "pressure": {"epsilons": [0.2, 0.1], "horizons": [2, 4], "samples": 2000, "dump_trajectories": 3}
    });
    let cfg = write_config(dir.path(), "p.json", &c);
    let out = dir.path().join("out");
    let o = run("pressure", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let traj = fs::read_to_string(out.join("trajectories.csv")).unwrap();
    let header = traj.lines().next().unwrap();
    assert!(header.starts_with("sample_id,t,x0") && header.ends_with(",birkhoff_sum"), "{header}");
    // three samples, T + 1 points each
    assert_eq!(traj.lines().count(), 1 + 3 * 5);
    let gap = read_json(&out.join("gap.json"));
    for k in ["pressure", "margin", "threshold", "satisfied"] {
        assert!(gap.get(k).is_some(), "{k}");
    }
    let pcsv = fs::read_to_string(out.join("pressure.csv")).unwrap();
    assert_eq!(pcsv.lines().next().unwrap(), "method,eps,T,value,error_bar");
}

#[test]
fn transfer_pressure_from_config() {
    let dir = tempfile::tempdir().unwrap();
    let c = serde_json::json!({
        "geometry": {"kind": "doubling"},
        "seed": 0,
        "pressure": {
            "estimator": "transfer",
            "adjacency": [[1, 1], [1, 0]],
            "weights": [0.0, 0.0],
            "observable": {"kind": "constant", "value": 0.0}
        }
    });
    let cfg = write_config(dir.path(), "t.json", &c);
    let out = dir.path().join("out");
    let o = run("pressure", &cfg, &out, &[]);
    assert!(o.status.success(), "{}", String::from_utf8_lossy(&o.stderr));
    let gap = read_json(&out.join("gap.json"));
    let golden = ((1.0 + 5f64.sqrt()) / 2.0).ln();
    assert!((gap["pressure"].as_f64().unwrap() - golden).abs() < 1e-10);
    assert_eq!(gap["satisfied"], false);
    assert!(!out.join("trajectories.csv").exists());
}

#[test]
fn print_defaults_is_a_valid_config() {
    let dir = tempfile::tempdir().unwrap();
    for ex in ["spectrum", "pressure", "decay", "verify-gap"] {
        let o = dwlab(&[ex, "--print-defaults"]);
        assert!(o.status.success());
        let v: Value = serde_json::from_slice(&o.stdout).unwrap();
        let path = write_config(dir.path(), &format!("{ex}.json"), &v);
        let cfg = dwlab_cli::load_config(&path, &dwlab_cli::Overrides::default());
        assert!(cfg.is_ok(), "{ex}: {}", cfg.unwrap_err());
    }
}

#[test]
fn experiment_mismatch_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = write_config(dir.path(), "c.json", &circle_spectrum());
    let o = run("decay", &cfg, &dir.path().join("out"), &["--seed", "1"]);
    assert_eq!(o.status.code(), Some(2));
    assert!(String::from_utf8_lossy(&o.stderr).contains("experiment"));
}
