//! Actor-critic with a stationary-density exploration bonus and a policy
//! variance tied to the diffusion coefficient.

use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{clamp_log_sigma, clip_to_bound, gaussian_sample, outer_scaled, AgentParams, StepReport, Transition};
use crate::density::DensityEstimate;
use crate::error::{Error, Result};
use crate::potential::{gradient_fd, Potential, Tabulated, DEFAULT_FD_STEP};
use crate::qae::{annealed_qae, QaeConfig};

/// Smallest density accepted by the bonus; lower values are floored.
pub const RHO_FLOOR: f64 = 1e-8;

/// Where the potential fed to the density estimator comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum FpPotentialSource {
    /// The environment's own potential along `x₁` (negated reward section).
    #[default]
    RewardSlice,
    /// `−φ₁·x₁` from the current critic, shifted to a zero minimum.
    CriticSlice,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QffConfig {
    pub alpha: f64,
    /// Inverse temperature handed to the density estimator.
    pub beta: f64,
    pub d_coeff: f64,
    pub eta_a: f64,
    pub eta_c: f64,
    pub gamma: f64,
    pub beta_m: f64,
    pub qae_refresh: usize,
    pub fp_potential_source: FpPotentialSource,
    /// Use `log σ += η(σ² − D)/σ`, which pushes σ away from `√D`.
    pub printed_sigma_sign: bool,
    pub init_log_sigma: f64,
}

impl Default for QffConfig {
    fn default() -> Self {
        Self {
            alpha: 0.5,
            beta: 1.5,
            d_coeff: 0.3,
            eta_a: 5e-3,
            eta_c: 1e-2,
            gamma: 0.99,
            beta_m: 0.9,
            qae_refresh: 10,
            fp_potential_source: FpPotentialSource::RewardSlice,
            printed_sigma_sign: false,
            init_log_sigma: 0.0,
        }
    }
}

impl QffConfig {
    pub fn validate(&self) -> Result<()> {
        let positive = [
            ("alpha", self.alpha),
            ("beta", self.beta),
            ("d_coeff", self.d_coeff),
            ("eta_a", self.eta_a),
            ("eta_c", self.eta_c),
            ("gamma", self.gamma),
            ("beta_m", self.beta_m),
        ];
        if let Some((name, v)) = positive.iter().find(|(_, v)| !(*v > 0.0 && v.is_finite())) {
            return Err(Error::Config(format!("qff.{name} must be positive, got {v}")));
        }
        if self.gamma >= 1.0 || self.beta_m >= 1.0 {
            return Err(Error::Config("qff.gamma and qff.beta_m must be < 1".into()));
        }
        if self.qae_refresh == 0 {
            return Err(Error::Config("qff.qae_refresh must be >= 1".into()));
        }
        Ok(())
    }
}

/// `α·ln(1/ρ̂)`, with `ρ̂` floored at [`RHO_FLOOR`].
pub fn exploration_bonus(rho_hat: f64, alpha: f64) -> f64 {
    let rho = if rho_hat.is_nan() { RHO_FLOOR } else { rho_hat.clamp(RHO_FLOOR, 1.0) };
    -alpha * rho.ln()
}

/// Samples `N(sᵀμ/‖s‖, σ²)` per component, clipped to the action bound.
pub fn qff_act(p: &AgentParams, s: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    clip_to_bound(&qff_sample(p, s, rng))
}

/// [`qff_act`] before clipping.
pub fn qff_sample(p: &AgentParams, s: &[f64], rng: &mut ChaCha8Rng) -> Vec<f64> {
    gaussian_sample(&p.policy_mean(s), p.sigma(), rng)
}

/// One critic TD step, one momentum actor step scaled by the drift at `s₁`,
/// and one step of the `σ² → D` relaxation.
pub fn qff_update(p: &AgentParams, t: &Transition, pot: &Potential, cfg: &QffConfig) -> Result<AgentParams> {
    p.check_shapes(t)?;
    let r_aug = t.r_env + exploration_bonus(t.rho_hat, cfg.alpha);
    let delta = p.td_error(r_aug, &t.s, &t.s_next, t.done, cfg.gamma);

    let mut next = p.clone();
    next.phi.iter_mut().zip(&t.s).for_each(|(w, si)| *w += cfg.eta_c * delta * si);

    let sigma = p.sigma();
    let var = sigma * sigma;
    let mean = p.policy_mean(&t.s);
    let score: Vec<f64> = t.a.iter().zip(&mean).map(|(a, m)| (a - m) / var).collect();
    let drift = -gradient_fd(pot, t.s[0], DEFAULT_FD_STEP);
    let grad = outer_scaled(&t.s, &score, delta * drift);
    for ((m, g), w) in next.momentum.iter_mut().zip(&grad).zip(next.mu.iter_mut()) {
        *m = cfg.beta_m * *m + (1.0 - cfg.beta_m) * g;
        *w += cfg.eta_a * *m;
    }

    let step = cfg.eta_a * (var - cfg.d_coeff) / sigma;
    let signed = if cfg.printed_sigma_sign { step } else { -step };
    next.log_sigma = clamp_log_sigma(p.log_sigma + signed);

    next.check_finite().map_err(|e| e.context(format!("delta = {delta}")))?;
    Ok(next)
}

/// Training-time state: parameters plus the cached density estimate.
#[derive(Debug, Clone)]
pub struct QffAgent {
    pub params: AgentParams,
    pub cfg: QffConfig,
    qae: QaeConfig,
    env_potential: Potential,
    fp_potential: Potential,
    cache: Option<DensityEstimate>,
    steps: usize,
    /// Number of density lookups that fell below [`RHO_FLOOR`].
    pub floor_hits: u64,
}

impl QffAgent {
    /// `env_potential` is the environment's potential along `x₁`; the
    /// estimator runs with `cfg.beta` on `qae`'s grid.
    pub fn new(
        state_dim: usize,
        action_dim: usize,
        cfg: QffConfig,
        qae: &QaeConfig,
        env_potential: Potential,
    ) -> Result<Self> {
        cfg.validate()?;
        let qae = QaeConfig { beta: cfg.beta, ..qae.clone() };
        qae.validate()?;
        qae.grid()?;
        Ok(Self {
            params: AgentParams::new(state_dim, action_dim, cfg.init_log_sigma),
            fp_potential: env_potential.clone(),
            env_potential,
            cfg,
            qae,
            cache: None,
            steps: 0,
            floor_hits: 0,
        })
    }

    pub fn fp_potential(&self) -> &Potential {
        &self.fp_potential
    }

    pub fn density(&self) -> Option<&DensityEstimate> {
        self.cache.as_ref()
    }

    fn refresh(&mut self) -> Result<()> {
        self.fp_potential = match self.cfg.fp_potential_source {
            FpPotentialSource::RewardSlice => self.env_potential.clone(),
            FpPotentialSource::CriticSlice => critic_slice(self.params.phi[0], self.qae.lower, self.qae.upper)?,
        };
        self.cache = Some(annealed_qae(&self.fp_potential, &self.qae.grid()?, &self.qae)?);
        Ok(())
    }

    /// Fills `t.rho_hat` from the cache (refreshed every `qae_refresh` steps)
    /// and applies [`qff_update`].
    pub fn observe(&mut self, t: &mut Transition) -> Result<StepReport> {
        if self.cache.is_none() || self.steps.is_multiple_of(self.cfg.qae_refresh) {
            self.refresh()?;
        }
        self.steps += 1;
        let rho = self.cache.as_ref().expect("refreshed above").mass_at(t.s_next[0]);
        if !(rho >= RHO_FLOOR) {
            self.floor_hits += 1;
        }
        t.rho_hat = rho.max(RHO_FLOOR);
        let bonus = exploration_bonus(t.rho_hat, self.cfg.alpha);
        let td_error = self.params.td_error(t.r_env + bonus, &t.s, &t.s_next, t.done, self.cfg.gamma);
        self.params = qff_update(&self.params, t, &self.fp_potential, &self.cfg)?;
        Ok(StepReport { bonus, td_error })
    }
}

/// Linear potential `−φ₁·x` on `[lower, upper]`, shifted to a zero minimum.
fn critic_slice(phi1: f64, lower: f64, upper: f64) -> Result<Potential> {
    let (a, b) = (-phi1 * lower, -phi1 * upper);
    let min = a.min(b);
    Ok(Potential::Tabulated(Tabulated::new(vec![(lower, a - min), (upper, b - min)])?))
}
