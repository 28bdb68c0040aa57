use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::ACTION_BOUND;

/// Uniform actions on `[−1, 1]^m`; no learning.
#[derive(Debug, Clone)]
pub struct RandomAgent {
    pub action_dim: usize,
}

pub fn random_act(action_dim: usize, rng: &mut ChaCha8Rng) -> Vec<f64> {
    (0..action_dim).map(|_| rng.random_range(-ACTION_BOUND..=ACTION_BOUND)).collect()
}
