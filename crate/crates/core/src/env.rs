//! Linear-Gaussian control task with a two-mode reward along the first coordinate.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::potential::Potential;

/// Which reward surface the environment exposes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize, Default)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum Landscape {
    /// Two Gaussian bumps (heights 8 and 15) split by a barrier at 0.
    #[default]
    Multimodal,
    /// `r(x) = −V(x₁)`, used for the 1D mode-collapse surrogate.
    NegPotential { potential: Potential },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct EnvConfig {
    pub state_dim: usize,
    pub action_dim: usize,
    pub horizon: usize,
    pub decay: f64,
    pub action_gain: f64,
    pub noise_scale: f64,
    pub action_clip: f64,
    /// Standard deviation of each reset coordinate.
    pub reset_std: f64,
    pub landscape: Landscape,
}

impl Default for EnvConfig {
    fn default() -> Self {
        Self {
            state_dim: 4,
            action_dim: 2,
            horizon: 200,
            decay: 0.92,
            action_gain: 0.15,
            noise_scale: 0.08,
            action_clip: 1.0,
            reset_std: 0.5,
            landscape: Landscape::Multimodal,
        }
    }
}

impl EnvConfig {
    /// The 1D surrogate task: state `x`, reward `−V(x)`, same dynamics.
    pub fn one_dimensional(potential: Potential) -> Self {
        Self { state_dim: 1, action_dim: 1, landscape: Landscape::NegPotential { potential }, ..Self::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.state_dim == 0 || self.action_dim == 0 || self.horizon == 0 {
            return Err(Error::Config("state_dim, action_dim and horizon must be >= 1".into()));
        }
        let gains = [self.decay, self.action_gain, self.noise_scale, self.action_clip, self.reset_std];
        if gains.iter().any(|g| !g.is_finite()) {
            return Err(Error::Config("environment gains must be finite".into()));
        }
        if self.action_clip <= 0.0 {
            return Err(Error::Config("action_clip must be positive".into()));
        }
        Ok(())
    }

    /// The potential whose negation is this environment's reward along `x₁`.
    pub fn fp_potential(&self) -> Potential {
        match &self.landscape {
            Landscape::Multimodal => Potential::RewardSlice,
            Landscape::NegPotential { potential } => potential.clone(),
        }
    }

    pub fn reward(&self, s: &[f64]) -> f64 {
        match &self.landscape {
            Landscape::Multimodal => reward_landscape(s),
            Landscape::NegPotential { potential } => -potential.value(s[0]),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct EnvState {
    pub s: Vec<f64>,
    pub step_index: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    pub state: EnvState,
    /// The clipped, length-`action_dim` action actually applied.
    pub action: Vec<f64>,
    pub reward: f64,
    pub done: bool,
}

/// `8·e^{−(x₁+1.5)²/0.32} + 15·e^{−(x₁−1.5)²/0.32} − 5·e^{−x₁²/0.18} − 0.05·‖x₂:d‖²`
pub fn reward_landscape(x: &[f64]) -> f64 {
    let tail: f64 = x.iter().skip(1).map(|v| v * v).sum();
    reward_along_x1(x[0]) - 0.05 * tail
}

/// [`reward_landscape`] with every coordinate but the first set to zero.
pub fn reward_along_x1(x1: f64) -> f64 {
    8.0 * (-(x1 + 1.5).powi(2) / 0.32).exp() + 15.0 * (-(x1 - 1.5).powi(2) / 0.32).exp() - 5.0 * (-x1 * x1 / 0.18).exp()
}

pub fn reset_with<R: Rng + ?Sized>(cfg: &EnvConfig, rng: &mut R) -> EnvState {
    let s = (0..cfg.state_dim).map(|_| cfg.reset_std * rng.sample::<f64, _>(StandardNormal)).collect();
    EnvState { s, step_index: 0 }
}

/// Reset from a bare seed; identical seeds give identical states.
pub fn reset(cfg: &EnvConfig, seed: u64) -> EnvState {
    reset_with(cfg, &mut ChaCha8Rng::seed_from_u64(seed))
}

/// Clips each component to `[−clip, clip]`.
pub fn clip_action(action: &[f64], clip: f64) -> Vec<f64> {
    action.iter().map(|a| a.clamp(-clip, clip)).collect()
}

/// Advances one step: `s′ = decay·s + gain·ã + noise·ξ`, where `ã` is the
/// clipped action zero-padded to the state dimension. Reward is taken at `s′`.
pub fn step<R: Rng + ?Sized>(state: &EnvState, action: &[f64], cfg: &EnvConfig, rng: &mut R) -> Result<StepOutcome> {
    if action.len() != cfg.action_dim {
        return Err(Error::Input(format!("action has length {}, expected {}", action.len(), cfg.action_dim)));
    }
    if let Some(i) = action.iter().position(|a| !a.is_finite()) {
        return Err(Error::Input(format!("non-finite action component {i}")));
    }
    let action = clip_action(action, cfg.action_clip);
    let s: Vec<f64> = state
        .s
        .iter()
        .enumerate()
        .map(|(i, &si)| {
            let push = action.get(i).copied().unwrap_or(0.0);
            let xi: f64 = rng.sample(StandardNormal);
            cfg.decay * si + cfg.action_gain * push + cfg.noise_scale * xi
        })
        .collect();
    let reward = cfg.reward(&s);
    let step_index = state.step_index + 1;
    Ok(StepOutcome { done: step_index >= cfg.horizon, state: EnvState { s, step_index }, action, reward })
}

/// True when `|s₁ − 1.5| < 0.5`.
pub fn is_global_optimum(state: &EnvState) -> bool {
    (state.s[0] - 1.5).abs() < 0.5
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn quiet() -> EnvConfig {
        EnvConfig { noise_scale: 0.0, ..EnvConfig::default() }
    }

    #[test]
    fn reward_hand_values() {
        let peak = 15.0 - 5.0 * (-12.5f64).exp() + 8.0 * (-28.125f64).exp();
        assert_abs_diff_eq!(reward_landscape(&[1.5, 0.0, 0.0, 0.0]), peak, epsilon = 1e-12);
        assert_abs_diff_eq!(reward_landscape(&[1.5, 0.0, 0.0, 0.0]), 14.99998, epsilon = 1e-5);
        assert_abs_diff_eq!(reward_landscape(&[-1.5, 0.0, 0.0, 0.0]), 7.99998, epsilon = 1e-5);
        assert_abs_diff_eq!(reward_landscape(&[0.0; 4]), 23.0 * (-7.03125f64).exp() - 5.0, epsilon = 1e-12);
        assert_abs_diff_eq!(reward_landscape(&[0.0; 4]), -4.9797, epsilon = 1e-4);
        assert_abs_diff_eq!(reward_landscape(&[0.0, 1.0, 2.0, 0.0]), reward_along_x1(0.0) - 0.25, epsilon = 1e-12);
    }

    #[test]
    fn reward_maximum_near_global_peak() {
        let (best_x, best_r) = (-3000..=3000)
            .map(|i| i as f64 * 1e-3)
            .map(|x| (x, reward_landscape(&[x, 0.0, 0.0, 0.0])))
            .max_by(|a, b| a.1.total_cmp(&b.1))
            .unwrap();
        assert!((best_x - 1.5).abs() < 0.02);
        assert!((best_r - 15.0).abs() < 0.01);
    }

    #[test]
    fn reset_is_seeded() {
        let cfg = EnvConfig::default();
        assert_eq!(reset(&cfg, 7), reset(&cfg, 7));
        assert_ne!(reset(&cfg, 7), reset(&cfg, 8));
        assert_eq!(reset(&cfg, 7).step_index, 0);
        assert_eq!(reset(&cfg, 7).s.len(), 4);
    }

    #[test]
    fn reset_mean_is_zero() {
        let cfg = EnvConfig::default();
        let n = 10_000;
        let mut sums = [0.0; 4];
        for seed in 0..n {
            for (acc, v) in sums.iter_mut().zip(reset(&cfg, seed).s) {
                *acc += v;
            }
        }
        let se = cfg.reset_std / (n as f64).sqrt();
        for s in sums {
            assert!((s / n as f64).abs() < 3.0 * se);
        }
    }

    #[test]
    fn zero_state_zero_action() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let st = EnvState { s: vec![0.0; 4], step_index: 0 };
        let out = step(&st, &[0.0, 0.0], &quiet(), &mut rng).unwrap();
        assert_eq!(out.state.s, vec![0.0; 4]);
        assert_abs_diff_eq!(out.reward, -4.9797, epsilon = 1e-4);
        assert!(!out.done);
    }

    #[test]
    fn linear_decay_and_clipping() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let st = EnvState { s: vec![1.0; 4], step_index: 0 };
        let out = step(&st, &[0.0, 0.0], &quiet(), &mut rng).unwrap();
        assert!(out.state.s.iter().all(|&v| (v - 0.92).abs() < 1e-15));

        let zero = EnvState { s: vec![0.0; 4], step_index: 0 };
        let big = step(&zero, &[5.0, 5.0], &quiet(), &mut rng).unwrap();
        let unit = step(&zero, &[1.0, 1.0], &quiet(), &mut rng).unwrap();
        assert_eq!(big.state.s, unit.state.s);
        assert_eq!(big.action, vec![1.0, 1.0]);
        assert_eq!(big.state.s, vec![0.15, 0.15, 0.0, 0.0]);
    }

    #[test]
    fn geometric_contraction() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let cfg = quiet();
        let mut st = EnvState { s: vec![0.3, -1.2, 2.0, 0.5], step_index: 0 };
        let n0: f64 = st.s.iter().map(|v| v * v).sum::<f64>().sqrt();
        for t in 1..=50 {
            st = step(&st, &[0.0, 0.0], &cfg, &mut rng).unwrap().state;
            let n: f64 = st.s.iter().map(|v| v * v).sum::<f64>().sqrt();
            assert!((n - 0.92f64.powi(t) * n0).abs() < 1e-12 * n0);
        }
    }

    #[test]
    fn horizon_and_errors() {
        let cfg = EnvConfig { horizon: 2, ..EnvConfig::default() };
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let st = reset(&cfg, 0);
        let a = step(&st, &[0.0, 0.0], &cfg, &mut rng).unwrap();
        assert!(!a.done);
        let b = step(&a.state, &[0.0, 0.0], &cfg, &mut rng).unwrap();
        assert!(b.done);
        assert!(matches!(step(&st, &[f64::NAN, 0.0], &cfg, &mut rng), Err(Error::Input(_))));
        assert!(matches!(step(&st, &[0.0], &cfg, &mut rng), Err(Error::Input(_))));
    }

    #[test]
    fn step_is_deterministic_given_stream() {
        let cfg = EnvConfig::default();
        let st = reset(&cfg, 3);
        let a = step(&st, &[0.2, -0.4], &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        let b = step(&st, &[0.2, -0.4], &cfg, &mut ChaCha8Rng::seed_from_u64(9)).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn global_optimum_flag() {
        let at = |x: f64| EnvState { s: vec![x, 0.0], step_index: 0 };
        assert!(is_global_optimum(&at(1.5)));
        assert!(!is_global_optimum(&at(1.0)));
        assert!(!is_global_optimum(&at(-1.5)));
    }

    #[test]
    fn one_dimensional_surrogate_reward() {
        let cfg = EnvConfig::one_dimensional(Potential::double_well());
        assert_abs_diff_eq!(cfg.reward(&[0.0]), -2.0, epsilon = 1e-15);
        assert_eq!(cfg.fp_potential(), Potential::double_well());
        assert_eq!(EnvConfig::default().fp_potential(), Potential::RewardSlice);
    }
}
