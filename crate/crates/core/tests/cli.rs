mod common;

use std::process::{Command, Output};

use common::small_config;
use serde_json::Value;

fn fpflow(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_fpflow")).args(args).output().unwrap()
}

fn stderr_json(out: &Output) -> Value {
    serde_json::from_slice(&out.stderr).unwrap_or_else(|e| panic!("{e}: {}", String::from_utf8_lossy(&out.stderr)))
}

#[test]
fn config_file_and_overrides() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("small.toml");
    std::fs::write(&cfg_path, small_config(dir.path()).to_toml_string().unwrap()).unwrap();
    let out_dir = dir.path().join("out");
    let out = fpflow(&[
        "train",
        "--config",
        cfg_path.to_str().unwrap(),
        "--out",
        out_dir.to_str().unwrap(),
        "--seed",
        "7,8",
        "--agent",
        "random,qff",
        "--episodes",
        "2",
    ]);
    assert!(out.status.success(), "{}", String::from_utf8_lossy(&out.stderr));
    let report: Value = serde_json::from_slice(&out.stdout).unwrap();
    assert_eq!(report["experiment"], "train");
    let files: Vec<&str> = report["files"].as_array().unwrap().iter().map(|f| f.as_str().unwrap()).collect();
    for name in ["train_qff_seed7.csv", "train_random_seed8.csv", "train_summary.json"] {
        assert!(files.iter().any(|f| f.ends_with(name)), "missing {name}");
        assert!(out_dir.join(name).exists());
    }
    assert!(!out_dir.join("train_sac_seed7.csv").exists());
    // Summary rows need a full final window of episodes.
    assert!(!out_dir.join("table1.csv").exists());
    let rows = csv::Reader::from_path(out_dir.join("train_qff_seed7.csv")).unwrap().records().count();
    assert_eq!(rows, 2);
}

#[test]
fn each_subcommand_runs() {
    let dir = tempfile::tempdir().unwrap();
    let cfg_path = dir.path().join("small.toml");
    std::fs::write(&cfg_path, small_config(dir.path()).to_toml_string().unwrap()).unwrap();
    for sub in ["complexity", "scaling", "ablate-qubits", "mode-collapse", "fp-solve"] {
        let out_dir = dir.path().join(sub);
        let out = fpflow(&[sub, "--config", cfg_path.to_str().unwrap(), "--out", out_dir.to_str().unwrap()]);
        assert!(out.status.success(), "{sub}: {}", String::from_utf8_lossy(&out.stderr));
        let report: Value = serde_json::from_slice(&out.stdout).unwrap();
        assert!(!report["files"].as_array().unwrap().is_empty());
    }
}

#[test]
fn failures_are_machine_readable() {
    let out = fpflow(&["train", "--agent", "ppo"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "config");

    let out = fpflow(&["dance"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "usage");

    let out = fpflow(&["fp-solve", "--config", "/nonexistent/fpflow.toml"]);
    assert_eq!(out.status.code(), Some(1));
    assert_eq!(stderr_json(&out)["error"], "io");

    let dir = tempfile::tempdir().unwrap();
    let bad = dir.path().join("bad.toml");
    std::fs::write(&bad, "episodes = 0\n").unwrap();
    let out = fpflow(&["train", "--config", bad.to_str().unwrap()]);
    assert_eq!(out.status.code(), Some(1));
    let err = stderr_json(&out);
    assert_eq!(err["error"], "config");
    assert!(err["message"].as_str().unwrap().contains("episodes"));

    std::fs::write(&bad, "epsiodes = 10\n").unwrap();
    let out = fpflow(&["train", "--config", bad.to_str().unwrap()]);
    assert_eq!(stderr_json(&out)["error"], "config");
}
