//! Entropy-regularised linear actor-critic trained with Adam.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{clamp_log_sigma, gaussian_sample, outer_scaled, AgentParams, StepReport, Transition};
use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SacConfig {
    pub eta: f64,
    /// Entropy temperature.
    pub alpha: f64,
    pub gamma: f64,
    pub adam_beta1: f64,
    pub adam_beta2: f64,
    pub adam_eps: f64,
    pub init_log_sigma: f64,
}

impl Default for SacConfig {
    fn default() -> Self {
        Self {
            eta: 5e-3,
            alpha: 0.2,
            gamma: 0.99,
            adam_beta1: 0.9,
            adam_beta2: 0.999,
            adam_eps: 1e-8,
            init_log_sigma: 0.0,
        }
    }
}

impl SacConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.eta > 0.0) || self.alpha < 0.0 || !(0.0..1.0).contains(&self.gamma) {
            return Err(Error::Config("sac: need eta > 0, alpha >= 0, 0 <= gamma < 1".into()));
        }
        if !(0.0..1.0).contains(&self.adam_beta1) || !(0.0..1.0).contains(&self.adam_beta2) {
            return Err(Error::Config("sac: Adam betas must lie in [0, 1)".into()));
        }
        Ok(())
    }
}

/// First/second-moment state for one parameter group.
#[derive(Debug, Clone, PartialEq)]
pub struct Adam {
    m: Vec<f64>,
    v: Vec<f64>,
    t: i32,
}

impl Adam {
    pub fn new(len: usize) -> Self {
        Self { m: vec![0.0; len], v: vec![0.0; len], t: 0 }
    }

    /// Ascent step `θ += η·m̂/(√v̂ + ε)`.
    pub fn ascend(&mut self, params: &mut [f64], grad: &[f64], cfg: &SacConfig) {
        self.t += 1;
        let c1 = 1.0 - cfg.adam_beta1.powi(self.t);
        let c2 = 1.0 - cfg.adam_beta2.powi(self.t);
        for ((p, g), (m, v)) in params.iter_mut().zip(grad).zip(self.m.iter_mut().zip(self.v.iter_mut())) {
            *m = cfg.adam_beta1 * *m + (1.0 - cfg.adam_beta1) * g;
            *v = cfg.adam_beta2 * *v + (1.0 - cfg.adam_beta2) * g * g;
            *p += cfg.eta * (*m / c1) / ((*v / c2).sqrt() + cfg.adam_eps);
        }
    }
}

/// Optimizer state for actor mean, log-std and critic.
#[derive(Debug, Clone, PartialEq)]
pub struct SacOptim {
    pub mu: Adam,
    pub log_sigma: Adam,
    pub phi: Adam,
}

impl SacOptim {
    pub fn new(p: &AgentParams) -> Self {
        Self { mu: Adam::new(p.mu.len()), log_sigma: Adam::new(1), phi: Adam::new(p.phi.len()) }
    }
}

/// Score-function policy gradient on the TD error plus the entropy gradient
/// `α·m` on `log σ`; critic by semi-gradient TD.
pub fn sac_update(p: &AgentParams, opt: &mut SacOptim, t: &Transition, cfg: &SacConfig) -> Result<(AgentParams, f64)> {
    p.check_shapes(t)?;
    let delta = p.td_error(t.r_env, &t.s, &t.s_next, t.done, cfg.gamma);
    let sigma = p.sigma();
    let mean = p.policy_mean(&t.s);
    let z: Vec<f64> = t.a.iter().zip(&mean).map(|(a, m)| (a - m) / sigma).collect();

    let grad_mu = outer_scaled(&t.s, &z.iter().map(|zj| zj / sigma).collect::<Vec<_>>(), delta);
    let grad_log_sigma = delta * z.iter().map(|zj| zj * zj - 1.0).sum::<f64>() + cfg.alpha * p.action_dim as f64;
    let grad_phi: Vec<f64> = t.s.iter().map(|si| delta * si).collect();

    let mut next = p.clone();
    opt.mu.ascend(&mut next.mu, &grad_mu, cfg);
    let mut ls = [next.log_sigma];
    opt.log_sigma.ascend(&mut ls, &[grad_log_sigma], cfg);
    next.log_sigma = clamp_log_sigma(ls[0]);
    opt.phi.ascend(&mut next.phi, &grad_phi, cfg);
    next.check_finite().map_err(|e| e.context(format!("delta = {delta}")))?;
    Ok((next, delta))
}

#[derive(Debug, Clone)]
pub struct SacAgent {
    pub params: AgentParams,
    pub optim: SacOptim,
    pub cfg: SacConfig,
}

impl SacAgent {
    pub fn new(state_dim: usize, action_dim: usize, cfg: SacConfig) -> Result<Self> {
        cfg.validate()?;
        let params = AgentParams::new(state_dim, action_dim, cfg.init_log_sigma);
        Ok(Self { optim: SacOptim::new(&params), params, cfg })
    }

    /// Unclipped Gaussian sample.
    pub fn act(&self, s: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
        gaussian_sample(&self.params.policy_mean(s), self.params.sigma(), rng)
    }

    pub fn observe(&mut self, t: &Transition) -> Result<StepReport> {
        let (next, td_error) = sac_update(&self.params, &mut self.optim, t, &self.cfg)?;
        self.params = next;
        Ok(StepReport { bonus: 0.0, td_error })
    }
}
