use std::fs;
use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use serde_json::Value;
use tempfile::TempDir;

use levy_schemes::schemes::FiniteActivityScheme;

const BIN: &str = env!("CARGO_BIN_EXE_levy-schemes");

fn write_config(dir: &Path, name: &str, body: &str) -> PathBuf {
    let p = dir.join(name);
    fs::write(&p, body).unwrap();
    p
}

fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).env_remove("LEVY_SCHEMES_WORKERS").output().unwrap()
}

fn code(o: &Output) -> i32 {
    o.status.code().unwrap()
}

fn stdout_json(o: &Output) -> Value {
    serde_json::from_slice(&o.stdout).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&o.stdout)))
}

const STABLE_SCHEME: &str = r#"{
  "measure": {"type": "truncated_stable", "alpha": 1, "c_plus": 1, "c_minus": 1},
  "scheme": {"kind": "three_moment", "epsilon": 0.1}
}"#;

#[test]
fn scheme_prints_atoms_and_intensity() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", STABLE_SCHEME);
    let o = run(&["scheme", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let v = stdout_json(&o);
    let s = &v["scheme"];
    assert!((s["lambda_eps"].as_f64().unwrap() - 38.0).abs() < 1e-10);
    let mut atoms: Vec<(f64, f64)> = s["atoms"]
        .as_array()
        .unwrap()
        .iter()
        .map(|a| (a[0].as_f64().unwrap(), a[1].as_f64().unwrap()))
        .collect();
    atoms.sort_by(|a, b| a.0.total_cmp(&b.0));
    assert_eq!(atoms.len(), 2);
    assert!((atoms[0].0 + 0.1).abs() < 1e-15 && (atoms[1].0 - 0.1).abs() < 1e-15);
    assert!((atoms[0].1 - 10.0).abs() < 1e-10 && (atoms[1].1 - 10.0).abs() < 1e-10);
    assert!(v["moment_check"]["max_rel_error"].as_f64().unwrap() < 1e-10);
}

#[test]
fn symmetric_nig_has_equal_rates() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{"measure": {"type": "nig", "alpha": 2, "beta": 0, "delta": 1},
            "scheme": {"kind": "three_moment", "epsilon": 0.05}}"#,
    );
    let o = run(&["scheme", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let atoms = stdout_json(&o)["scheme"]["atoms"].as_array().unwrap().clone();
    assert_eq!(atoms.len(), 2);
    assert_eq!(atoms[0][1].as_f64().unwrap(), atoms[1][1].as_f64().unwrap());
}

#[test]
fn scheme_json_re_ingests_identically() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{"measure": {"type": "cgmy", "C": 1, "G": 2, "M": 5, "Y": 0.7},
            "scheme": {"kind": "high_order", "epsilon": 0.1, "n": 3}}"#,
    );
    let out = d.path().join("o");
    let o = run(&["scheme", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(out.join("scheme.json")).unwrap();
    let s = FiniteActivityScheme::from_json(&text).unwrap();
    assert_eq!(format!("{}\n", s.to_json().unwrap()), text);
    assert_eq!(stdout_json(&o)["scheme"], serde_json::from_str::<Value>(&text).unwrap());
}

#[test]
fn epsilon_too_large_is_a_numerical_failure() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{"measure": {"type": "nig", "alpha": 20, "beta": 0, "delta": 1},
            "scheme": {"kind": "high_order", "epsilon": 0.5, "n": 3}}"#,
    );
    let o = run(&["scheme", "--config", cfg.to_str().unwrap()]);
    assert_eq!(code(&o), 3);
    assert!(String::from_utf8_lossy(&o.stderr).contains("epsilon too large"));
    assert!(o.stdout.is_empty());
}

#[test]
fn config_errors_exit_with_two() {
    let d = TempDir::new().unwrap();
    let bad = write_config(d.path(), "bad.json", r#"{"measure": {"type": "nig", "alpha": 2, "beta": 0, "delta": 1}, "sceme": {}}"#);
    assert_eq!(code(&run(&["scheme", "--config", bad.to_str().unwrap()])), 2);
    let missing = d.path().join("nope.json");
    assert_eq!(code(&run(&["scheme", "--config", missing.to_str().unwrap()])), 2);
    assert_eq!(code(&run(&["scheme"])), 2);
    assert_eq!(code(&run(&["bogus"])), 2);
    assert_eq!(code(&run(&["scheme", "--paths", "many"])), 2);
    let domain = write_config(
        d.path(),
        "dom.json",
        r#"{"measure": {"type": "nig", "alpha": 1, "beta": 3, "delta": 1}, "scheme": {"kind": "three_moment", "epsilon": 0.1}}"#,
    );
    assert_eq!(code(&run(&["scheme", "--config", domain.to_str().unwrap()])), 2);
    let ok = write_config(d.path(), "ok.json", STABLE_SCHEME);
    let o = Command::new(BIN)
        .args(["scheme", "--config", ok.to_str().unwrap()])
        .env("LEVY_SCHEMES_WORKERS", "0")
        .output()
        .unwrap();
    assert_eq!(code(&o), 2);
    assert_eq!(code(&run(&["--version"])), 0);
    assert_eq!(code(&run(&["--help"])), 0);
}

const CONVERGE: &str = r#"{
  "measure": {"type": "truncated_stable", "alpha": 1, "c_plus": 0.5, "c_minus": 0.5},
  "sde": {"coefficient": {"type": "sin", "a": 1}, "x0": 1, "payoff": {"type": "cos", "omega": 2}},
  "study": {
    "family": {"type": "jump_adapted", "kind": "three_moment"},
    "grid": [0.4, 0.2, 0.1, 0.05],
    "reference": {"type": "high_order", "n_paths": 20000}
  },
  "n_paths": 5000,
  "seed": 17
}"#;

#[test]
fn converge_is_byte_identical_across_runs_and_workers() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", CONVERGE);
    let mut csvs = Vec::new();
    for (i, w) in ["1", "3", "1"].iter().enumerate() {
        let out = d.path().join(format!("o{i}"));
        let o = run(&["converge", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap(), "--workers", w]);
        assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
        csvs.push((
            fs::read(out.join("converge.csv")).unwrap(),
            fs::read(out.join("converge_summary.json")).unwrap(),
            fs::read(out.join("converge_meta.json")).unwrap(),
        ));
    }
    assert!(csvs.windows(2).all(|w| w[0] == w[1]));
    let text = String::from_utf8(csvs[0].0.clone()).unwrap();
    assert!(!text.contains('\r'));
    let mut rdr = csv::Reader::from_reader(text.as_bytes());
    assert_eq!(rdr.headers().unwrap().iter().collect::<Vec<_>>(), levy_schemes::mc::CSV_HEADER);
    let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
    assert_eq!(rows.len(), 4);
    for r in &rows {
        assert_eq!(&r[5], "");
        assert_eq!(&r[6], "5000");
        assert!(r[1].parse::<f64>().unwrap() > 0.0);
    }
    let summary: Value = serde_json::from_slice(&csvs[0].1).unwrap();
    assert!(summary["noise_floor"].as_f64().unwrap() > 0.0);
    assert_eq!(summary["cost_axis"], "lambda_eps");
}

#[test]
fn converge_needs_four_grid_points() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(d.path(), "c.json", &CONVERGE.replace("[0.4, 0.2, 0.1, 0.05]", "[0.4, 0.2, 0.1]"));
    let out = d.path().join("o");
    assert_eq!(code(&run(&["converge", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()])), 2);
}

#[test]
fn euler_study_uses_step_counts() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
  "measure": {"type": "nig", "alpha": 2, "beta": 0, "delta": 2},
  "sde": {"coefficient": {"type": "sin", "a": 1}, "x0": 0.7854, "payoff": {"type": "cos", "omega": 2}},
  "study": {"family": {"type": "euler"}, "grid": [2, 4, 8, 16], "reference": {"type": "value", "value": 0.1}},
  "n_paths": 2000
}"#,
    );
    let out = d.path().join("o");
    let o = run(&["converge", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let text = fs::read_to_string(out.join("converge.csv")).unwrap();
    let controls: Vec<String> = text.lines().skip(1).map(|l| l.split(',').next().unwrap().to_owned()).collect();
    assert_eq!(controls, ["2.0", "4.0", "8.0", "16.0"]);
    assert_eq!(stdout_json(&o)["cost_axis"], "n_steps");
}

#[test]
fn fig1_degenerate_mode_writes_zero_curves() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
  "measure": {"type": "nig_subordinated", "sigma": 0.5, "theta": 0.4, "kappa": 0.6},
  "sde": {"coefficient": {"type": "constant", "value": 0}, "x0": 1, "payoff": {"type": "call", "strike": 1}},
  "fig1": {"costs": [4, 8, 16], "reference": {"type": "high_order", "epsilon": 0.1, "n_paths": 2000}},
  "n_paths": 1000
}"#,
    );
    let out = d.path().join("o");
    let o = run(&["fig1", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0, "{}", String::from_utf8_lossy(&o.stderr));
    let mut files: Vec<String> = fs::read_dir(&out)
        .unwrap()
        .map(|e| e.unwrap().file_name().into_string().unwrap())
        .collect();
    files.sort();
    assert_eq!(files, ["euler.csv", "fig1_meta.json", "gaussian_compensation.csv", "three_moment.csv"]);
    for f in ["euler.csv", "gaussian_compensation.csv", "three_moment.csv"] {
        let mut rdr = csv::Reader::from_path(out.join(f)).unwrap();
        let rows: Vec<csv::StringRecord> = rdr.records().map(|r| r.unwrap()).collect();
        assert!(!rows.is_empty(), "{f}");
        for r in rows {
            assert_eq!(r[2].parse::<f64>().unwrap(), 0.0, "{f}");
        }
    }
    let meta: Value = serde_json::from_str(&fs::read_to_string(out.join("fig1_meta.json")).unwrap()).unwrap();
    assert_eq!(meta["label"], "parametrization-ambiguous");

    let gp = d.path().join("gp");
    let o = run(&["fig1", "--config", cfg.to_str().unwrap(), "--out", gp.to_str().unwrap(), "--gnuplot"]);
    assert_eq!(code(&o), 0);
    assert!(gp.join("fig1.gp").exists());
}

#[test]
fn estimate_and_optimality_commands() {
    let d = TempDir::new().unwrap();
    let cfg = write_config(
        d.path(),
        "c.json",
        r#"{
  "measure": {"type": "truncated_stable", "alpha": 1.5, "c_plus": 1, "c_minus": 1},
  "scheme": {"kind": "three_moment", "epsilon": 0.1},
  "sde": {"coefficient": {"type": "constant", "value": 1}, "x0": 0, "payoff": {"type": "power", "k": 2}},
  "optimality": {"epsilons": [0.1, 0.01, 0.001]},
  "n_paths": 50000
}"#,
    );
    let o = run(&["estimate", "--config", cfg.to_str().unwrap(), "--seed", "4"]);
    assert_eq!(code(&o), 0);
    let v = stdout_json(&o);
    // E[Z₁²] = ∫x²ν = 2·1.5/(2−1.5)
    let (m, se) = (v["mean"].as_f64().unwrap(), v["stderr"].as_f64().unwrap());
    assert!((m - 6.0).abs() < 4.0 * se, "{m} ± {se}");
    assert_eq!(v["wall_time_s"].as_f64().unwrap(), 0.0);

    let out = d.path().join("o");
    let o = run(&["optimality", "--config", cfg.to_str().unwrap(), "--out", out.to_str().unwrap()]);
    assert_eq!(code(&o), 0);
    let text = fs::read_to_string(out.join("optimality.csv")).unwrap();
    assert!(text.starts_with("epsilon,lambda_eps,error_moment4,E_N,ratio\n"));
    assert_eq!(text.lines().count(), 4);
}
