#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::Path;

use fpflow::harness::ExperimentConfig;

/// Defaults shrunk so every experiment finishes in well under a second.
pub fn small_config(out: &Path) -> ExperimentConfig {
    let mut cfg =
        ExperimentConfig { seeds: vec![0, 1], episodes: 4, output_dir: out.to_path_buf(), ..Default::default() };
    cfg.env.horizon = 30;
    cfg.complexity.epsilons = vec![1e-1, 3e-2, 1e-2];
    cfg.complexity.trials = 30;
    cfg.scaling.dims = vec![1, 2, 4];
    cfg.scaling.repetitions = 1;
    cfg.scaling.step_budget = 20;
    cfg.ablation.qubits = vec![3, 4, 5];
    cfg.mode_collapse.episodes = 20;
    cfg.mode_collapse.horizon = 30;
    cfg.mode_collapse.final_window = 10;
    cfg.fp_solve.n_qubits = 6;
    cfg.fp_solve.n_qubits_2d = 4;
    cfg.fp_solve.t_end = 0.5;
    cfg.fp_solve.snapshots = 5;
    cfg
}

/// File name → bytes for every file directly under `dir`.
pub fn read_dir_bytes(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let path = e.unwrap().path();
            (path.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&path).unwrap())
        })
        .collect()
}

pub fn is_timing_file(name: &str) -> bool {
    name.starts_with("scaling_timing")
}

pub fn csv_header(path: &Path) -> Vec<String> {
    let mut reader = csv::Reader::from_path(path).unwrap();
    reader.headers().unwrap().iter().map(String::from).collect()
}
