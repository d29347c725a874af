//! Contract tests for the command-line binary: outputs, determinism and exit codes.

use std::path::Path;
use std::process::{Command, Output};

fn bin() -> Command {
    let mut c = Command::new(env!("CARGO_BIN_EXE_fracskellam"));
    c.env_remove("FRACSKELLAM_OUT_DIR").env_remove("FRACSKELLAM_THREADS");
    c
}

fn run(args: &[&str], out: &Path) -> Output {
    bin().arg("--out").arg(out).args(args).output().unwrap()
}

fn read_json(p: &Path) -> serde_json::Value {
    serde_json::from_str(&std::fs::read_to_string(p).unwrap()).unwrap()
}

#[test]
fn pmf_center_value() {
    let dir = tempfile::tempdir().unwrap();
    let o = run(&["pmf", "--t", "1"], dir.path());
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let text = std::fs::read_to_string(dir.path().join("pmf.csv")).unwrap();
    assert!(text.starts_with("t,n,value\n"));
    let row = text.lines().find(|l| l.starts_with("1.0,0,")).unwrap();
    let p: f64 = row.rsplit(',').next().unwrap().parse().unwrap();
    assert!((p - 0.308_508_322_553_671).abs() < 1e-10);
    let meta = read_json(&dir.path().join("pmf.meta.json"));
    assert_eq!(meta["command"], "pmf");
    assert!(meta["tolerances"]["rel_tol"].is_number());
}

#[test]
fn simulate_is_deterministic_and_long_format() {
    let a = tempfile::tempdir().unwrap();
    let b = tempfile::tempdir().unwrap();
    let args = ["--seed", "11", "simulate", "--paths", "50", "--steps", "10", "--t-end", "1"];
    assert_eq!(run(&args, a.path()).status.code(), Some(0));
    let o = bin().env("FRACSKELLAM_THREADS", "1").arg("--out").arg(b.path()).args(args).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    let x = std::fs::read(a.path().join("paths.csv")).unwrap();
    let y = std::fs::read(b.path().join("paths.csv")).unwrap();
    assert_eq!(x, y);
    let text = String::from_utf8(x).unwrap();
    assert_eq!(text.lines().next(), Some("path_id,t,value"));
    assert_eq!(text.lines().count(), 1 + 50 * 10);
    let meta = read_json(&a.path().join("paths.meta.json"));
    assert_eq!(meta["seed"], 11);
}

#[test]
fn gamma_clock_sidecar_embeds_the_spec() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
        [process]
        alpha = 0.8
        rates = { lambda = [1.0, 0.5], mu = [0.5, 0.5] }
        time_change = { type = "subordinator", clock = { kind = "gamma", a = 2.0, b = 3.0 } }
        [mc]
        n_paths = 20
        seed = 5
        "#,
    )
    .unwrap();
    let o = bin().arg("--config").arg(&cfg).arg("--out").arg(dir.path()).args(["--format", "json", "simulate"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    assert!(!dir.path().join("paths.csv").exists());
    let doc = read_json(&dir.path().join("paths.json"));
    assert_eq!(doc["process"]["alpha"], 0.8);
    assert_eq!(doc["process"]["time_change"]["clock"]["a"], 2.0);
    assert_eq!(doc["process"]["time_change"]["clock"]["b"], 3.0);
    assert_eq!(doc["process"]["rates"]["lambda"][1], 0.5);
    assert_eq!(doc["seed"], 5);
    assert_eq!(doc["data"]["paths"].as_array().unwrap().len(), 20);
}

#[test]
fn moments_first_column_matches_clock_column() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
        [process]
        alpha = 0.6
        rates = { lambda = [1.0, 0.5], mu = [0.2, 0.1] }
        time_change = { type = "subordinator", clock = { kind = "inverse_gaussian", delta = 1.0, gam = 1.5 } }
        "#,
    )
    .unwrap();
    let o = bin().arg("--config").arg(&cfg).arg("--out").arg(dir.path()).args(["--seed", "3", "moments", "--r-max", "3"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let mut rdr = csv::Reader::from_path(dir.path().join("moments.csv")).unwrap();
    let h = rdr.headers().unwrap().clone();
    let col = |name: &str| h.iter().position(|x| x == name).unwrap();
    let (f1, r1, mean, clk) = (col("factorial_1"), col("raw_1"), col("mean"), col("l1_clock_moment"));
    let mut rows = 0;
    for rec in rdr.records() {
        let rec = rec.unwrap();
        let v = |i: usize| rec[i].parse::<f64>().unwrap();
        assert!((v(f1) - v(clk)).abs() <= 1e-12 * v(clk).abs());
        assert_eq!(v(f1), v(r1));
        assert_eq!(v(f1), v(mean));
        rows += 1;
    }
    assert_eq!(rows, 4);
}

#[test]
fn corr_json_schema() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.toml");
    std::fs::write(
        &cfg,
        r#"
        [process]
        alpha = 0.6
        rates = { lambda = [5.0], mu = [1.0] }
        time_change = { type = "subordinator", clock = { kind = "gamma", a = 1.0, b = 1.0 } }
        "#,
    )
    .unwrap();
    let o = bin().arg("--config").arg(&cfg).arg("--out").arg(dir.path()).args(["--format", "both", "corr"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0), "{}", String::from_utf8_lossy(&o.stderr));
    let doc = read_json(&dir.path().join("corr.json"));
    let fit = &doc["data"]["fit"];
    for key in ["exponent", "c_s", "fit_r2"] {
        assert!(fit[key].is_number(), "{key}");
    }
    assert!((fit["exponent"].as_f64().unwrap() - 0.6).abs() < 0.05);
    let meta = read_json(&dir.path().join("corr.meta.json"));
    assert!(meta["params"]["fit_r2"].as_f64().unwrap() > 0.95);
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    // sampling without a seed
    assert_eq!(run(&["simulate"], dir.path()).status.code(), Some(2));
    // unknown subcommand and malformed config
    assert_eq!(run(&["frobnicate"], dir.path()).status.code(), Some(2));
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "[process]\nalpha = 2.0\nrates = { lambda = [1.0], mu = [1.0] }\n").unwrap();
    let o = bin().arg("--config").arg(&bad).arg("--out").arg(dir.path()).arg("pmf").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    std::fs::write(&bad, "no_such_key = 1\n").unwrap();
    let o = bin().arg("--config").arg(&bad).arg("--out").arg(dir.path()).arg("pmf").output().unwrap();
    assert_eq!(o.status.code(), Some(2));
    // validation passes, then fails under an analytic-side rate perturbation
    assert_eq!(run(&["validate", "--criterion", "1,10"], dir.path()).status.code(), Some(0));
    let o = run(&["validate", "--criterion", "4,5", "--perturb-lambda1", "0.5"], dir.path());
    assert_eq!(o.status.code(), Some(1));
    let report = read_json(&dir.path().join("validation.meta.json"));
    assert_eq!(report["command"], "validate");
}

#[test]
fn out_dir_from_environment() {
    let dir = tempfile::tempdir().unwrap();
    let o = bin().env("FRACSKELLAM_OUT_DIR", dir.path()).args(["pmf", "--t", "0.5"]).output().unwrap();
    assert_eq!(o.status.code(), Some(0));
    assert!(dir.path().join("pmf.csv").exists());
}
