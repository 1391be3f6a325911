//! End-to-end checks of the binary: exit codes, output layout, and artifact
//! determinism.

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_cutstock"))
}

fn dataset() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../../data/paper_instance.toml")
}

/// Overrides making every command finish in well under a second.
fn tiny(cmd: &mut Command) -> &mut Command {
    cmd.args([
        "--override",
        "train.l1=2",
        "--override",
        "train.l2=30",
        "--override",
        "cem.n1=2",
        "--override",
        "cem.n2=10",
        "--override",
        "basis.kind=polynomial",
        "--override",
        "eval.replications=2",
        "--override",
        "eval.horizon=15",
        "--override",
        "eval.bootstrap_resamples=50",
    ])
}

fn run(cmd: &mut Command) -> Output {
    cmd.output().expect("binary runs")
}

#[test]
fn validate_accepts_shipped_dataset() {
    let out = run(bin().arg("validate").arg(dataset()));
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("7 item types"), "{stdout}");
    assert!(stdout.contains("15 patterns"), "{stdout}");
}

#[test]
fn validate_rejects_missing_file_with_code_3() {
    let out = run(bin().arg("validate").arg("/nonexistent/file.toml"));
    assert_eq!(out.status.code(), Some(3));
}

#[test]
fn validate_rejects_bad_instance_with_code_3() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("bad.toml");
    // Pattern exceeds object length.
    std::fs::write(
        &path,
        r#"
object_length = 10
item_lengths = [6]
patterns = [[2]]
s_max = 5
x_max = 2
[cost_factors]
holding = 0.01
lost_sales = 1.0
trim = 0.1
[demand]
p = [1.0]
d_min = 0
d_max = 1
"#,
    )
    .unwrap();
    let out = run(bin().arg("validate").arg(&path));
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("exceeds object length"), "{stderr}");
}

#[test]
fn unknown_flag_is_a_usage_error() {
    let out = run(bin().args(["train", "--no-such-flag"]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn missing_config_file_reports_code_3() {
    let out = run(bin().args(["train", "--config", "/nonexistent/cfg.toml"]));
    assert_eq!(out.status.code(), Some(3));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("config not found"), "{stderr}");
}

#[test]
fn train_twice_yields_byte_identical_artifacts() {
    let root = tempfile::tempdir().unwrap();
    for name in ["a", "b"] {
        let out = run(tiny(bin().args([
            "train",
            "--seed",
            "42",
            "--name",
            name,
            "--override",
            &format!("output_root={}", root.path().display()),
        ])));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    }
    let a = std::fs::read(root.path().join("a/artifact.json")).unwrap();
    let b = std::fs::read(root.path().join("b/artifact.json")).unwrap();
    assert!(!a.is_empty());
    assert_eq!(a, b);
}

#[test]
fn evaluate_artifact_writes_contracted_csvs() {
    let root = tempfile::tempdir().unwrap();
    let root_ov = format!("output_root={}", root.path().display());
    let out = run(tiny(bin().args(["train", "--name", "t", "--override", &root_ov])));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let artifact = root.path().join("t/artifact.json");
    let out = run(tiny(bin().args([
        "evaluate",
        artifact.to_str().unwrap(),
        "--select",
        "best",
        "--traces",
        "--name",
        "e",
        "--override",
        &root_ov,
    ])));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = root.path().join("e/csv");
    let summary = std::fs::read_to_string(csv.join("summary.csv")).unwrap();
    assert!(summary.starts_with("policy,mean,ci_lo,ci_hi\n"), "{summary}");
    let costs = std::fs::read_to_string(csv.join("costs.csv")).unwrap();
    assert!(costs.starts_with("replication,step,cost,rolling_mean\n"));
    // 2 replications x 15 steps + header.
    assert_eq!(costs.lines().count(), 31);
    let inventory = std::fs::read_to_string(csv.join("inventory.csv")).unwrap();
    assert!(inventory.starts_with("step,item,initial,available,demand\n"));
}

#[test]
fn evaluate_unreadable_artifact_fails() {
    let out = run(tiny(bin().args(["evaluate", "/nonexistent/artifact.json"])));
    assert!(!out.status.success());
    assert_ne!(out.status.code(), Some(0));
}

#[test]
fn evaluate_baselines_print_summary() {
    let root = tempfile::tempdir().unwrap();
    let root_ov = format!("output_root={}", root.path().display());
    for target in ["myopic", "random"] {
        let out = run(tiny(bin().args([
            "evaluate",
            target,
            "--name",
            target,
            "--override",
            &root_ov,
        ])));
        assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
        let stdout = String::from_utf8_lossy(&out.stdout);
        assert!(stdout.contains(target), "{stdout}");
    }
}

#[test]
fn sweep_writes_one_row_per_gamma() {
    let root = tempfile::tempdir().unwrap();
    let root_ov = format!("output_root={}", root.path().display());
    let out = run(tiny(bin().args([
        "sweep",
        "--gammas",
        "0.5,0.8",
        "--name",
        "s",
        "--override",
        &root_ov,
    ])));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let csv = std::fs::read_to_string(root.path().join("s/csv/gamma_sweep.csv")).unwrap();
    let lines: Vec<&str> = csv.lines().collect();
    assert_eq!(lines[0], "gamma,mean,ci_lo,ci_hi");
    assert_eq!(lines.len(), 3);
    assert!(lines[1].starts_with("0.5,"));
    assert!(lines[2].starts_with("0.8,"));
}

#[test]
fn sweep_empty_gamma_list_is_a_usage_error() {
    let out = run(bin().args(["sweep", "--gammas", ""]));
    assert_eq!(out.status.code(), Some(2));
}

#[test]
fn inspect_prints_diagnostics() {
    let root = tempfile::tempdir().unwrap();
    let root_ov = format!("output_root={}", root.path().display());
    let out = run(tiny(bin().args(["train", "--name", "t", "--override", &root_ov])));
    assert!(out.status.success());
    let artifact = root.path().join("t/artifact.json");
    let out = run(bin().args(["inspect", artifact.to_str().unwrap()]));
    assert!(out.status.success());
    let stdout = String::from_utf8_lossy(&out.stdout);
    assert!(stdout.contains("iteration"), "{stdout}");
    assert!(stdout.contains("K=15"), "{stdout}");
}

#[test]
fn aborted_training_exits_4_and_persists_partial_artifact() {
    let root = tempfile::tempdir().unwrap();
    // A rejection cap of 1 trips the sampling budget almost immediately.
    let out = run(tiny(bin().args([
        "train",
        "--name",
        "boom",
        "--override",
        "cem.rejection_cap=1",
        "--override",
        "train.l2=200",
        "--override",
        &format!("output_root={}", root.path().display()),
    ])));
    assert_eq!(out.status.code(), Some(4));
    let stderr = String::from_utf8_lossy(&out.stderr);
    assert!(stderr.contains("aborted"), "{stderr}");
    assert!(root.path().join("boom/artifact.partial.json").exists());
    assert!(!root.path().join("boom/artifact.json").exists());
}

#[test]
fn config_file_with_override_precedence() {
    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("cfg.toml");
    std::fs::write(
        &cfg,
        format!(
            "output_root = \"{}\"\n[train]\nl1 = 1\nl2 = 25\n[cem]\nn1 = 2\nn2 = 10\n[basis]\nkind = \"polynomial\"\n",
            dir.path().join("out").display()
        ),
    )
    .unwrap();
    let out = run(bin().args([
        "train",
        "--config",
        cfg.to_str().unwrap(),
        "--name",
        "o",
        "--override",
        "train.l1=2",
    ]));
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    // The echoed config preserves the original text; the artifact reflects
    // the override.
    let echoed = std::fs::read_to_string(dir.path().join("out/o/config.echo.toml")).unwrap();
    assert!(echoed.contains("l1 = 1"));
    let artifact = std::fs::read_to_string(dir.path().join("out/o/artifact.json")).unwrap();
    assert!(artifact.contains("\"l1\": 2"));
}
