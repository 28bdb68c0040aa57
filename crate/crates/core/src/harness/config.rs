use std::path::{Path, PathBuf};

use serde::{Deserialize, Serialize};

use crate::agents::{AgentKind, DdpgConfig, QffConfig, SacConfig};
use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::potential::Potential;
use crate::qae::{QaeConfig, MIN_TRIALS};

/// Which experiment a config drives.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Experiment {
    Train,
    Complexity,
    Scaling,
    QubitAblation,
    ModeCollapse,
    FpSolve,
}

impl Experiment {
    pub fn name(self) -> &'static str {
        match self {
            Experiment::Train => "train",
            Experiment::Complexity => "complexity",
            Experiment::Scaling => "scaling",
            Experiment::QubitAblation => "qubit_ablation",
            Experiment::ModeCollapse => "mode_collapse",
            Experiment::FpSolve => "fp_solve",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub seeds: Vec<u64>,
    pub episodes: usize,
    pub agents: Vec<AgentKind>,
    pub output_dir: PathBuf,
    /// Also write per-step state/action traces for training runs.
    pub record_traces: bool,
    pub env: EnvConfig,
    pub qae: QaeConfig,
    pub qff: QffConfig,
    pub sac: SacConfig,
    pub ddpg: DdpgConfig,
    pub complexity: ComplexityConfig,
    pub scaling: ScalingConfig,
    pub ablation: AblationConfig,
    pub mode_collapse: ModeCollapseConfig,
    pub fp_solve: FpSolveConfig,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            seeds: vec![0, 1, 2, 3, 4],
            episodes: 400,
            agents: AgentKind::ALL.to_vec(),
            output_dir: PathBuf::from("results"),
            record_traces: false,
            env: EnvConfig::default(),
            qae: QaeConfig::default(),
            qff: QffConfig::default(),
            sac: SacConfig::default(),
            ddpg: DdpgConfig::default(),
            complexity: ComplexityConfig::default(),
            scaling: ScalingConfig::default(),
            ablation: AblationConfig::default(),
            mode_collapse: ModeCollapseConfig::default(),
            fp_solve: FpSolveConfig::default(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ComplexityConfig {
    pub epsilons: Vec<f64>,
    pub trials: usize,
    pub d_coeff: f64,
    pub n_qubits: u32,
    pub lower: f64,
    pub upper: f64,
    pub potential: Potential,
}

impl Default for ComplexityConfig {
    fn default() -> Self {
        Self {
            epsilons: vec![1e-1, 3e-2, 1e-2, 3e-3, 1e-3],
            trials: 60,
            d_coeff: 0.3,
            n_qubits: 7,
            lower: -3.0,
            upper: 3.0,
            potential: Potential::double_well(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScalingConfig {
    pub dims: Vec<usize>,
    pub repetitions: usize,
    /// Classical target precision; sample count is `⌈1/ε²⌉`.
    pub epsilon: f64,
    /// Agent steps simulated on the quantum-inspired side.
    pub step_budget: usize,
    pub d_coeff: f64,
    pub potential: Potential,
}

impl Default for ScalingConfig {
    fn default() -> Self {
        Self {
            dims: vec![1, 2, 4, 8, 16, 32],
            repetitions: 5,
            epsilon: 3e-2,
            step_budget: 200,
            d_coeff: 0.3,
            potential: Potential::double_well(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct AblationConfig {
    pub qubits: Vec<u32>,
    pub potential: Potential,
    /// Diffusion for the secondary reference column; the primary reference
    /// uses `D = 1/β` from the estimator's own config.
    pub d_coeff: f64,
}

impl Default for AblationConfig {
    fn default() -> Self {
        Self { qubits: (3..=9).collect(), potential: Potential::double_well(), d_coeff: 0.3 }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ModeCollapseConfig {
    pub episodes: usize,
    pub horizon: usize,
    pub eval_every: usize,
    /// Episodes pooled into the final visitation density.
    pub final_window: usize,
    pub taus: Vec<f64>,
    pub agents: Vec<AgentKind>,
    pub potential: Potential,
}

impl Default for ModeCollapseConfig {
    fn default() -> Self {
        Self {
            episodes: 300,
            horizon: 200,
            eval_every: 10,
            final_window: 50,
            taus: vec![0.01, 0.05, 0.1, 0.25, 0.5],
            agents: vec![AgentKind::Qff, AgentKind::Sac],
            potential: Potential::double_well(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FpSolveConfig {
    pub potential: Potential,
    /// Second axis of the separable 2D potential.
    pub potential_x2: Potential,
    pub d_coeff: f64,
    pub n_qubits: u32,
    pub n_qubits_2d: u32,
    pub lower: f64,
    pub upper: f64,
    pub t_end: f64,
    pub snapshots: usize,
}

impl Default for FpSolveConfig {
    fn default() -> Self {
        Self {
            potential: Potential::double_well(),
            potential_x2: Potential::double_well(),
            d_coeff: 0.3,
            n_qubits: 9,
            n_qubits_2d: 6,
            lower: -3.0,
            upper: 3.0,
            t_end: 1500.0,
            snapshots: 50,
        }
    }
}

impl ExperimentConfig {
    pub fn from_toml_str(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        Self::from_toml_str(&text)
    }

    pub fn to_toml_string(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Config(e.to_string()))
    }

    pub fn validate(&self) -> Result<()> {
        if self.seeds.is_empty() {
            return Err(Error::Config("at least one seed is required".into()));
        }
        if self.episodes == 0 {
            return Err(Error::Config("episodes must be >= 1".into()));
        }
        if self.agents.is_empty() {
            return Err(Error::Config("at least one agent is required".into()));
        }
        self.env.validate()?;
        self.qae.validate()?;
        self.qae.grid()?;
        self.qff.validate()?;
        self.sac.validate()?;
        self.ddpg.validate()?;
        if self.complexity.trials < MIN_TRIALS {
            return Err(Error::Config(format!("complexity.trials must be >= {MIN_TRIALS}")));
        }
        if self.complexity.epsilons.iter().any(|e| !(*e > 0.0)) {
            return Err(Error::Config("complexity.epsilons must be positive".into()));
        }
        if self.scaling.dims.contains(&0) || self.scaling.repetitions == 0 || !(self.scaling.epsilon > 0.0) {
            return Err(Error::Config("scaling needs dims >= 1, repetitions >= 1, epsilon > 0".into()));
        }
        let mc = &self.mode_collapse;
        if mc.eval_every == 0 || mc.final_window == 0 || mc.horizon == 0 || mc.episodes == 0 {
            return Err(Error::Config("mode_collapse counts must be >= 1".into()));
        }
        if mc.taus.iter().any(|t| !(*t >= 0.0)) {
            return Err(Error::Config("mode_collapse.taus must be >= 0".into()));
        }
        if !(self.fp_solve.t_end > 0.0) || self.fp_solve.snapshots == 0 {
            return Err(Error::Config("fp_solve needs t_end > 0 and snapshots >= 1".into()));
        }
        Ok(())
    }
}
