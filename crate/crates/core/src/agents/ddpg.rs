//! Deterministic linear policy with Ornstein–Uhlenbeck exploration noise.

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use super::{outer_scaled, AgentParams, StepReport, Transition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct DdpgConfig {
    pub eta_a: f64,
    pub eta_c: f64,
    pub gamma: f64,
    pub theta_ou: f64,
    pub sigma_ou: f64,
}

impl Default for DdpgConfig {
    fn default() -> Self {
        Self { eta_a: 5e-3, eta_c: 1e-2, gamma: 0.99, theta_ou: 0.15, sigma_ou: 0.2 }
    }
}

impl DdpgConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta_a > 0.0 && self.eta_c > 0.0) || !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config("ddpg: need positive rates and 0 <= gamma < 1".into()));
        }
        if !(self.theta_ou > 0.0 && self.theta_ou < 2.0) || self.sigma_ou < 0.0 {
            return Err(Error::Config("ddpg: need 0 < theta_ou < 2 and sigma_ou >= 0".into()));
        }
        Ok(())
    }
}

/// `n ← n − θ·n + σ·ξ`, reset to zero at episode start.
#[derive(Debug, Clone, PartialEq)]
pub struct OuNoise {
    pub state: Vec<f64>,
    pub theta: f64,
    pub sigma: f64,
}

impl OuNoise {
    pub fn new(dim: usize, theta: f64, sigma: f64) -> Self {
        Self { state: vec![0.0; dim], theta, sigma }
    }

    pub fn reset(&mut self) {
        self.state.iter_mut().for_each(|n| *n = 0.0);
    }

    /// Advances one step and returns the new noise.
    pub fn sample<R: Rng + ?Sized>(&mut self, rng: &mut R) -> &[f64] {
        for n in self.state.iter_mut() {
            let xi: f64 = rng.sample(StandardNormal);
            *n += -self.theta * *n + self.sigma * xi;
        }
        &self.state
    }

    /// `σ/√(2θ − θ²)`.
    pub fn stationary_std(&self) -> f64 {
        self.sigma / (2.0 * self.theta - self.theta * self.theta).sqrt()
    }
}

/// Critic TD step and actor step `μ += η·δ·outer(ŝ, a − μ(s))`.
pub fn ddpg_update(p: &AgentParams, t: &Transition, cfg: &DdpgConfig) -> Result<(AgentParams, f64)> {
    p.check_shapes(t)?;
    let delta = p.td_error(t.r_env, &t.s, &t.s_next, t.done, cfg.gamma);
    let mean = p.policy_mean(&t.s);
    let perturbation: Vec<f64> = t.a.iter().zip(&mean).map(|(a, m)| a - m).collect();
    let grad = outer_scaled(&t.s, &perturbation, delta);
    let mut next = p.clone();
    next.mu.iter_mut().zip(&grad).for_each(|(w, g)| *w += cfg.eta_a * g);
    next.phi.iter_mut().zip(&t.s).for_each(|(w, si)| *w += cfg.eta_c * delta * si);
    next.check_finite().map_err(|e| e.context(format!("delta = {delta}")))?;
    Ok((next, delta))
}

#[derive(Debug, Clone)]
pub struct DdpgAgent {
    pub params: AgentParams,
    pub noise: OuNoise,
    pub cfg: DdpgConfig,
}

impl DdpgAgent {
    pub fn new(state_dim: usize, action_dim: usize, cfg: DdpgConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Self {
            params: AgentParams::new(state_dim, action_dim, 0.0),
            noise: OuNoise::new(action_dim, cfg.theta_ou, cfg.sigma_ou),
            cfg,
        })
    }

    /// Unclipped `μ(s) + n_t`.
    pub fn act(&mut self, s: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        let mean = self.params.policy_mean(s);
        let noise = self.noise.sample(rng);
        mean.iter().zip(noise).map(|(m, n)| m + n).collect()
    }

    pub fn observe(&mut self, t: &Transition) -> Result<StepReport> {
        let (next, td_error) = ddpg_update(&self.params, t, &self.cfg)?;
        self.params = next;
        Ok(StepReport { bonus: 0.0, td_error })
    }
}
