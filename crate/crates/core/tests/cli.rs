use std::path::Path;
use std::process::{Command, Output};

use zeno_core::noise::NoiseModel;
use zeno_core::output::data_lines;

fn zeno(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_zeno"))
        .args(args)
        .env_remove("ZENO_OUTPUT_DIR")
        .output()
        .unwrap()
}

fn stdout(o: &Output) -> String {
    String::from_utf8(o.stdout.clone()).unwrap()
}

fn stderr(o: &Output) -> String {
    String::from_utf8(o.stderr.clone()).unwrap()
}

fn fit_slope(csv: &str) -> f64 {
    let line = csv
        .lines()
        .find(|l| l.starts_with("# fit: slope="))
        .expect("fit line");
    line["# fit: slope=".len()..]
        .split_whitespace()
        .next()
        .unwrap()
        .parse()
        .unwrap()
}

fn column(csv: &str, idx: usize) -> Vec<f64> {
    data_lines(csv)
        .iter()
        .skip(1)
        .map(|l| l.split(',').nth(idx).unwrap().parse().unwrap())
        .collect()
}

#[test]
fn verify_passes() {
    let out = zeno(&["verify"]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    let rows = doc["rows"].as_array().unwrap();
    assert!(rows.len() > 20);
    for r in rows {
        assert!(r["status"] == "pass" || r["status"] == "discrepancy", "{r}");
        assert!(r["identity"].is_string());
        assert!(r["max_defect"].as_f64().unwrap() <= 1e-12);
    }
    assert!(stderr(&out).contains("all hold"));
}

#[test]
fn sweep_slope_and_header() {
    let out = zeno(&["sweep", "--n", "1", "--seed", "7", "--eps", "1e-3..3e-2"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    let first = csv.lines().next().unwrap();
    assert!(first.starts_with("# config: {"));
    let cfg: serde_json::Value = serde_json::from_str(&first["# config: ".len()..]).unwrap();
    assert_eq!(cfg["seed"], 7);
    assert_eq!(
        data_lines(&csv)[0],
        "epsilon,failure_probability,infidelity"
    );
    let slope = fit_slope(&csv);
    assert!((1.95..=2.05).contains(&slope), "slope {slope}");
    let eps = column(&csv, 0);
    assert_eq!(eps.len(), 8);
    assert!(data_lines(&csv)[1].starts_with("1.00000000000e-3,"));
}

#[test]
fn zeno_failure_column_is_monotone() {
    let out = zeno(&["zeno", "--total-eps", "0.05", "--k", "1,2,4,8,16"]);
    assert_eq!(out.status.code(), Some(0));
    let csv = stdout(&out);
    let ks: Vec<&str> = data_lines(&csv)
        .iter()
        .skip(1)
        .map(|l| l.split(',').next().unwrap())
        .collect();
    assert_eq!(ks, ["1", "2", "4", "8", "16"]);
    let fails = column(&csv, 1);
    assert!(fails.windows(2).all(|w| w[1] <= w[0]), "{fails:?}");
}

#[test]
fn identical_runs_give_identical_rows() {
    for args in [
        vec!["sweep", "--n", "2", "--seed", "3"],
        vec!["zeno", "--seed", "3", "--env-policy", "persist"],
        vec!["twotime", "--n", "2", "--seed", "3", "--psi", "basis:2"],
    ] {
        let (a, b) = (stdout(&zeno(&args)), stdout(&zeno(&args)));
        assert_eq!(data_lines(&a), data_lines(&b));
        let mut quiet = args.clone();
        quiet.push("--no-timestamp");
        assert_eq!(zeno(&quiet).stdout, zeno(&quiet).stdout);
    }
}

#[test]
fn invalid_config_exit_code() {
    let out = zeno(&["sweep", "--n", "9"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("n: 9 is outside"));
    let out = zeno(&["zeno", "--k", "1,0"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("ks"));
    let out = zeno(&["sweep", "--eps", "0.01,0.02,0.03,0.04"]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("epsilons"));
    assert_eq!(zeno(&["sweep", "--bogus"]).status.code(), Some(2));
}

#[test]
fn floor_exit_code() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("zero.json");
    std::fs::write(&path, NoiseModel::zero(1).unwrap().to_json()).unwrap();
    let out = zeno(&[
        "sweep",
        "--noise-file",
        path.to_str().unwrap(),
        "--format",
        "json",
    ]);
    assert_eq!(out.status.code(), Some(3));
    let doc: serde_json::Value = serde_json::from_str(&stdout(&out)).unwrap();
    assert_eq!(doc["fit"]["status"], "floor");
    assert_eq!(doc["config"]["noise"]["kind"], "file");
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.json");
    std::fs::write(
        &cfg,
        r#"{"command":"zeno","n":1,"ks":[1,2,4],"total_epsilon":0.02,"seed":5}"#,
    )
    .unwrap();
    let out = zeno(&["run", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert_eq!(column(&stdout(&out), 0), vec![1.0, 2.0, 4.0]);

    let out = zeno(&["zeno", "--config", cfg.to_str().unwrap(), "--k", "2,4"]);
    assert_eq!(column(&stdout(&out), 0), vec![2.0, 4.0]);

    let out = zeno(&["sweep", "--config", cfg.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("command"));

    // The embedded config reproduces the run.
    let first = stdout(&zeno(&["run", "--config", cfg.to_str().unwrap()]));
    let embedded = dir.path().join("embedded.json");
    std::fs::write(
        &embedded,
        &first.lines().next().unwrap()["# config: ".len()..],
    )
    .unwrap();
    let again = stdout(&zeno(&["run", "--config", embedded.to_str().unwrap()]));
    assert_eq!(data_lines(&first), data_lines(&again));
}

#[test]
fn output_locations() {
    let dir = tempfile::tempdir().unwrap();
    let explicit = dir.path().join("nested/out.json");
    let out = zeno(&[
        "twotime",
        "--format",
        "json",
        "--output",
        explicit.to_str().unwrap(),
    ]);
    assert_eq!(out.status.code(), Some(0), "{}", stderr(&out));
    assert!(out.stdout.is_empty());
    let doc: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(&explicit).unwrap()).unwrap();
    assert_eq!(doc["rows"].as_array().unwrap().len(), 8);
    assert!(doc["fit"]["slope"].as_f64().is_some());

    let out = Command::new(env!("CARGO_BIN_EXE_zeno"))
        .args(["zeno", "--k", "1,2"])
        .env("ZENO_OUTPUT_DIR", dir.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(Path::new(&dir.path().join("zeno.csv")).exists());
}
