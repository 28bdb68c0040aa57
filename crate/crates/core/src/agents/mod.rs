//! Linear-Gaussian actor-critic agents and baselines.

mod ddpg;
mod qff;
mod random;
mod sac;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub use ddpg::{ddpg_update, DdpgAgent, DdpgConfig, OuNoise};
pub use qff::{exploration_bonus, qff_act, qff_sample, qff_update, FpPotentialSource, QffAgent, QffConfig, RHO_FLOOR};
pub use random::{random_act, RandomAgent};
pub use sac::{sac_update, Adam, SacAgent, SacConfig};

/// Actions are clipped componentwise to `[−ACTION_BOUND, ACTION_BOUND]`.
pub const ACTION_BOUND: f64 = 1.0;
pub const MIN_SIGMA: f64 = 1e-3;
pub const MAX_SIGMA: f64 = 1e2;

/// Linear policy and critic weights.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AgentParams {
    pub state_dim: usize,
    pub action_dim: usize,
    /// Policy mean weights, `d × m` row-major.
    pub mu: Vec<f64>,
    pub log_sigma: f64,
    /// Critic weights, `V(s) = φᵀs`.
    pub phi: Vec<f64>,
    /// Actor momentum, same shape as `mu`.
    pub momentum: Vec<f64>,
}

impl AgentParams {
    /// Zero weights with the given initial `log σ` (clamped).
    pub fn new(state_dim: usize, action_dim: usize, log_sigma: f64) -> Self {
        Self {
            state_dim,
            action_dim,
            mu: vec![0.0; state_dim * action_dim],
            log_sigma: clamp_log_sigma(log_sigma),
            phi: vec![0.0; state_dim],
            momentum: vec![0.0; state_dim * action_dim],
        }
    }

    pub fn sigma(&self) -> f64 {
        self.log_sigma.exp()
    }

    /// `sᵀμ / max(‖s‖, 1e−8)`.
    pub fn policy_mean(&self, s: &[f64]) -> Vec<f64> {
        let s_hat = unit(s);
        (0..self.action_dim)
            .map(|j| s_hat.iter().enumerate().map(|(i, v)| v * self.mu[i * self.action_dim + j]).sum())
            .collect()
    }

    pub fn value(&self, s: &[f64]) -> f64 {
        dot(&self.phi, s)
    }

    /// `r + γ·φᵀs′·(1 − done) − φᵀs`.
    pub fn td_error(&self, reward: f64, s: &[f64], s_next: &[f64], done: bool, gamma: f64) -> f64 {
        let bootstrap = if done { 0.0 } else { gamma * self.value(s_next) };
        reward + bootstrap - self.value(s)
    }

    /// Returns a parameter error naming the first non-finite field.
    pub fn check_finite(&self) -> Result<()> {
        let groups: [(&str, &[f64]); 4] = [
            ("mu", &self.mu),
            ("log_sigma", std::slice::from_ref(&self.log_sigma)),
            ("phi", &self.phi),
            ("momentum", &self.momentum),
        ];
        for (name, values) in groups {
            if let Some(i) = values.iter().position(|v| !v.is_finite()) {
                return Err(Error::Parameter(format!("{name}[{i}] became {}", values[i])));
            }
        }
        Ok(())
    }

    fn check_shapes(&self, t: &Transition) -> Result<()> {
        if t.s.len() != self.state_dim || t.s_next.len() != self.state_dim || t.a.len() != self.action_dim {
            return Err(Error::Input(format!(
                "transition shapes ({}, {}, {}) do not match d = {}, m = {}",
                t.s.len(),
                t.a.len(),
                t.s_next.len(),
                self.state_dim,
                self.action_dim
            )));
        }
        Ok(())
    }
}

/// One environment step as seen by an update rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition {
    pub s: Vec<f64>,
    /// The action as sampled from the policy, before the environment clips
    /// it, so that `a − mean` is the policy's own perturbation.
    pub a: Vec<f64>,
    pub r_env: f64,
    pub s_next: Vec<f64>,
    pub done: bool,
    /// Estimated stationary mass at the visited state; 1 when unused.
    pub rho_hat: f64,
}

pub(crate) fn clamp_log_sigma(log_sigma: f64) -> f64 {
    log_sigma.clamp(MIN_SIGMA.ln(), MAX_SIGMA.ln())
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

pub(crate) fn unit(s: &[f64]) -> Vec<f64> {
    let norm = dot(s, s).sqrt().max(1e-8);
    s.iter().map(|v| v / norm).collect()
}

/// `outer(ŝ, v)` scaled by `c`, `d × m` row-major.
pub(crate) fn outer_scaled(s: &[f64], v: &[f64], c: f64) -> Vec<f64> {
    let s_hat = unit(s);
    s_hat.iter().flat_map(|si| v.iter().map(move |vj| c * si * vj)).collect()
}

/// Unclipped `N(mean, σ²I)` draw.
pub(crate) fn gaussian_sample(mean: &[f64], sigma: f64, rng: &mut ChaCha8Rng) -> Vec<f64> {
    mean.iter().map(|m| m + sigma * rng.sample::<f64, _>(StandardNormal)).collect()
}

/// Clips each component to `[−ACTION_BOUND, ACTION_BOUND]`.
pub fn clip_to_bound(a: &[f64]) -> Vec<f64> {
    a.iter().map(|x| x.clamp(-ACTION_BOUND, ACTION_BOUND)).collect()
}

/// Agent families available to the harness.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum AgentKind {
    Qff,
    Sac,
    Ddpg,
    Random,
}

impl AgentKind {
    pub const ALL: [AgentKind; 4] = [AgentKind::Qff, AgentKind::Sac, AgentKind::Ddpg, AgentKind::Random];

    pub fn name(self) -> &'static str {
        match self {
            AgentKind::Qff => "qff",
            AgentKind::Sac => "sac",
            AgentKind::Ddpg => "ddpg",
            AgentKind::Random => "random",
        }
    }
}

impl std::str::FromStr for AgentKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim().to_ascii_lowercase().as_str() {
            "qff" | "fpflow" => Ok(AgentKind::Qff),
            "sac" | "sac-lite" | "sac_lite" => Ok(AgentKind::Sac),
            "ddpg" | "ddpg-lite" | "ddpg_lite" => Ok(AgentKind::Ddpg),
            "random" => Ok(AgentKind::Random),
            other => Err(Error::Config(format!("unknown agent '{other}'"))),
        }
    }
}

/// What an agent reports back after learning from one step.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct StepReport {
    pub bonus: f64,
    pub td_error: f64,
}

/// Any of the four agents behind one interface.
#[derive(Debug, Clone)]
pub enum Agent {
    Qff(QffAgent),
    Sac(SacAgent),
    Ddpg(DdpgAgent),
    Random(RandomAgent),
}

impl Agent {
    pub fn kind(&self) -> AgentKind {
        match self {
            Agent::Qff(_) => AgentKind::Qff,
            Agent::Sac(_) => AgentKind::Sac,
            Agent::Ddpg(_) => AgentKind::Ddpg,
            Agent::Random(_) => AgentKind::Random,
        }
    }

    pub fn begin_episode(&mut self) {
        if let Agent::Ddpg(a) = self {
            a.noise.reset();
        }
    }

    /// Unclipped action sample; the environment applies the clip.
    pub fn act(&mut self, s: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        match self {
            Agent::Qff(a) => qff_sample(&a.params, s, rng),
            Agent::Sac(a) => a.act(s, rng),
            Agent::Ddpg(a) => a.act(s, rng),
            Agent::Random(a) => random_act(a.action_dim, rng),
        }
    }

    pub fn observe(&mut self, s: &[f64], a: &[f64], r_env: f64, s_next: &[f64], done: bool) -> Result<StepReport> {
        let mut t = Transition { s: s.to_vec(), a: a.to_vec(), r_env, s_next: s_next.to_vec(), done, rho_hat: 1.0 };
        match self {
            Agent::Qff(agent) => agent.observe(&mut t),
            Agent::Sac(agent) => agent.observe(&t),
            Agent::Ddpg(agent) => agent.observe(&t),
            Agent::Random(_) => Ok(StepReport::default()),
        }
    }

    /// Differential entropy of the current exploration distribution, nats.
    pub fn entropy(&self) -> f64 {
        match self {
            Agent::Qff(a) => crate::metrics::policy_entropy(a.params.log_sigma, a.params.action_dim),
            Agent::Sac(a) => crate::metrics::policy_entropy(a.params.log_sigma, a.params.action_dim),
            Agent::Ddpg(a) => {
                crate::metrics::policy_entropy(a.noise.stationary_std().max(MIN_SIGMA).ln(), a.params.action_dim)
            }
            Agent::Random(a) => a.action_dim as f64 * (2.0 * ACTION_BOUND).ln(),
        }
    }

    pub fn params(&self) -> Option<&AgentParams> {
        match self {
            Agent::Qff(a) => Some(&a.params),
            Agent::Sac(a) => Some(&a.params),
            Agent::Ddpg(a) => Some(&a.params),
            Agent::Random(_) => None,
        }
    }

    /// Policy standard deviation for Gaussian agents.
    pub fn sigma(&self) -> Option<f64> {
        match self {
            Agent::Qff(a) => Some(a.params.sigma()),
            Agent::Sac(a) => Some(a.params.sigma()),
            _ => None,
        }
    }
}
