//! End-to-end tests of the `tagrad` binary: exit codes, artifact layout,
//! and the flag > environment > config precedence for the output directory.

use std::path::Path;
use std::process::{Command, Output};

use tagrad::harness::parse_curve_csv;

fn tagrad() -> Command {
    let mut cmd = Command::new(env!("CARGO_BIN_EXE_tagrad"));
    // Isolate from any ambient override so precedence tests see only what
    // they set themselves.
    cmd.env_remove("TAGRAD_OUT_DIR");
    cmd
}

fn stdout(out: &Output) -> String {
    String::from_utf8(out.stdout.clone()).unwrap()
}

fn stderr(out: &Output) -> String {
    String::from_utf8(out.stderr.clone()).unwrap()
}

// On E = w^2 both methods contract the parameter by half per iteration, so
// every seed converges to 1e-12 in about 20 iterations.
const QUADRATIC_CAMPAIGN: &str = r#"
objective = "quadratic"
n_seeds = 3
max_iters = 200
stop_energy = 1e-12
eta = 1.0

[[method]]
kind = "sgd"
label = "sgd"
lr = 0.25

[[method]]
kind = "fixed"
label = "fixed"
gamma = 0.25
"#;

fn write_config(dir: &Path, text: &str) -> std::path::PathBuf {
    let path = dir.join("experiment.toml");
    std::fs::write(&path, text).unwrap();
    path
}

#[test]
fn run_emits_artifacts_and_exits_zero() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), QUADRATIC_CAMPAIGN);
    let out_dir = tmp.path().join("artifacts");

    let out = tagrad()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("sgd: converged 3/3"), "stdout: {text}");
    assert!(text.contains("fixed: converged 3/3"), "stdout: {text}");

    let curve = std::fs::read_to_string(out_dir.join("00-sgd.csv")).unwrap();
    let parsed = parse_curve_csv(&curve).unwrap();
    assert!(!parsed.is_empty());
    assert!(out_dir.join("01-fixed.csv").exists());

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    let entries = summary.as_array().unwrap();
    assert_eq!(entries.len(), 6, "two methods x three seeds");
    assert!(entries
        .iter()
        .all(|e| e["outcome"] == "converged" && e["final_energy"].as_f64().unwrap() <= 1e-12));
}

#[test]
fn seeds_flag_overrides_config_value() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), QUADRATIC_CAMPAIGN);
    let out_dir = tmp.path().join("artifacts");

    let out = tagrad()
        .args(["run", "--seeds", "5", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("sgd: converged 5/5"));

    let summary: serde_json::Value =
        serde_json::from_str(&std::fs::read_to_string(out_dir.join("summary.json")).unwrap())
            .unwrap();
    assert_eq!(summary.as_array().unwrap().len(), 10);
}

#[test]
fn unknown_config_key_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(tmp.path(), "objective = \"quadratic\"\nbogus = 1\n");

    let out = tagrad().args(["run", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
    assert!(stderr(&out).contains("bogus"));
}

#[test]
fn missing_config_file_exits_two() {
    let out = tagrad()
        .args(["run", "--config", "/nonexistent/experiment.toml"])
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn method_diverging_on_every_seed_exits_one() {
    let tmp = tempfile::tempdir().unwrap();
    let config = write_config(
        tmp.path(),
        r#"
objective = "quadratic"
n_seeds = 3
max_iters = 50

[[method]]
kind = "fixed"
label = "blowup"
gamma = 1e308
"#,
    );
    let out_dir = tmp.path().join("artifacts");

    let out = tagrad()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&out_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(1), "stderr: {}", stderr(&out));
    assert!(stdout(&out).contains("diverged 3/3"));
    // Artifacts are still written so the failure can be inspected.
    assert!(out_dir.join("summary.json").exists());
}

#[test]
fn out_dir_precedence_is_flag_env_config() {
    let tmp = tempfile::tempdir().unwrap();
    let config_dir = tmp.path().join("from-config");
    // Top-level keys must precede the [[method]] tables.
    let toml = format!(
        "out_dir = {:?}\n{QUADRATIC_CAMPAIGN}",
        config_dir.to_str().unwrap()
    );
    let config = write_config(tmp.path(), &toml);

    let env_dir = tmp.path().join("from-env");
    let flag_dir = tmp.path().join("from-flag");

    // Flag wins over both.
    let out = tagrad()
        .args(["run", "--config"])
        .arg(&config)
        .arg("--out-dir")
        .arg(&flag_dir)
        .env("TAGRAD_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(flag_dir.join("summary.json").exists());
    assert!(!env_dir.exists());
    assert!(!config_dir.exists());

    // Environment wins over the config file.
    let out = tagrad()
        .args(["run", "--config"])
        .arg(&config)
        .env("TAGRAD_OUT_DIR", &env_dir)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(env_dir.join("summary.json").exists());
    assert!(!config_dir.exists());

    // Config value is the fallback.
    let out = tagrad().args(["run", "--config"]).arg(&config).output().unwrap();
    assert_eq!(out.status.code(), Some(0));
    assert!(config_dir.join("summary.json").exists());
}

#[test]
fn oracle_sweep_passes_and_writes_curves() {
    let tmp = tempfile::tempdir().unwrap();
    let out = tagrad()
        .args(["oracle", "--out-dir"])
        .arg(tmp.path())
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("worst relative reach-time error"));

    let curves: Vec<_> = std::fs::read_dir(tmp.path())
        .unwrap()
        .map(|e| e.unwrap().path())
        .collect();
    assert_eq!(curves.len(), 27, "9 power-law + 18 combined grid points");
    let any = std::fs::read_to_string(&curves[0]).unwrap();
    assert!(any.starts_with("t,E\n"));
}

#[test]
fn oracle_with_impossible_budget_exits_one() {
    let out = tagrad().args(["oracle", "--budget", "1e-9"]).output().unwrap();
    assert_eq!(out.status.code(), Some(1));
    assert!(stderr(&out).contains("exceeds budget"));
}

#[test]
fn dataset_round_trips_through_files_and_stdout() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("data.csv");

    let out = tagrad()
        .args(["dataset", "emit", "--samples", "40", "--seed", "7", "--out"])
        .arg(&file)
        .output()
        .unwrap();
    assert_eq!(out.status.code(), Some(0));

    let to_stdout = tagrad()
        .args(["dataset", "emit", "--samples", "40", "--seed", "7"])
        .output()
        .unwrap();
    assert_eq!(
        to_stdout.stdout,
        std::fs::read(&file).unwrap(),
        "stdout and file emission are byte-identical"
    );

    let imported = tagrad().args(["dataset", "import"]).arg(&file).output().unwrap();
    assert_eq!(imported.status.code(), Some(0));
    let text = stdout(&imported);
    assert!(text.contains("40 samples"), "stdout: {text}");
    assert!(text.contains("canonical: yes"), "stdout: {text}");
}

#[test]
fn malformed_dataset_exits_two() {
    let tmp = tempfile::tempdir().unwrap();
    let file = tmp.path().join("bad.csv");
    std::fs::write(&file, "x1,x2,y\n0.1,oops,0.3\n").unwrap();

    let out = tagrad().args(["dataset", "import"]).arg(&file).output().unwrap();
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn check_suite_passes() {
    let out = tagrad().arg("check").output().unwrap();
    assert_eq!(out.status.code(), Some(0), "stderr: {}", stderr(&out));
    let text = stdout(&out);
    assert!(text.contains("all checks passed"), "stdout: {text}");
    assert!(!text.contains("FAILED"), "stdout: {text}");
}
