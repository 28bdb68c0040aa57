//! Experiment orchestration and result export.

mod config;
mod experiments;
mod output;
mod training;

pub use config::{
    AblationConfig, ComplexityConfig, Experiment, ExperimentConfig, FpSolveConfig, ModeCollapseConfig, ScalingConfig,
};
pub use experiments::{
    classical_mc_partition_nd, run_complexity, run_fp_solve, run_mode_collapse, run_qubit_ablation, run_scaling,
    AblationRow, AblationSummary, ComplexityRow, ComplexitySummary, CoverageRow, FpSolveSummary, KlRow,
    ModeCollapseAgentSummary, ModeCollapseSummary, ScalingTimingRow, ScalingTimingSummary, ScalingWorkRow,
    ScalingWorkSummary,
};
pub use output::{write_csv, write_json, write_table};
pub use training::{
    build_agent, run_training, train_agent, AgentAggregate, StepRecord, TrainedRun, TrainingOutput, TrainingSummary,
};

use std::path::PathBuf;

/// Runs one experiment and returns the files it wrote.
pub fn run_experiment(kind: Experiment, cfg: &ExperimentConfig) -> crate::Result<Vec<PathBuf>> {
    Ok(match kind {
        Experiment::Train => run_training(cfg)?.files,
        Experiment::Complexity => run_complexity(cfg)?.1,
        Experiment::Scaling => run_scaling(cfg)?.2,
        Experiment::QubitAblation => run_qubit_ablation(cfg)?.1,
        Experiment::ModeCollapse => run_mode_collapse(cfg)?.1,
        Experiment::FpSolve => run_fp_solve(cfg)?.1,
    })
}
