//! Summary statistics for training runs and density comparisons.

use serde::{Deserialize, Serialize};

use crate::density::DensityEstimate;
use crate::error::{Error, Result};

/// Episodes averaged for the end-of-training summary.
pub const FINAL_WINDOW: usize = 80;
pub const KL_FLOOR: f64 = 1e-12;

/// Trailing moving average; the first `window − 1` entries average the
/// available prefix.
pub fn smooth(series: &[f64], window: usize) -> Result<Vec<f64>> {
    if window == 0 {
        return Err(Error::Input("smoothing window must be >= 1".into()));
    }
    let mut out = Vec::with_capacity(series.len());
    let mut sum = 0.0;
    for (i, &x) in series.iter().enumerate() {
        sum += x;
        if i >= window {
            sum -= series[i - window];
        }
        out.push(sum / (i + 1).min(window) as f64);
    }
    Ok(out)
}

/// Differential entropy of `N(·, σ²·I_m)` in nats.
pub fn policy_entropy(log_sigma: f64, m: usize) -> f64 {
    m as f64 * (0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln() + log_sigma)
}

/// `Σ pᵢ ln(pᵢ / max(qᵢ, 1e−12))`, skipping `pᵢ = 0`.
pub fn kl_divergence(p: &DensityEstimate, q: &DensityEstimate) -> Result<f64> {
    p.check_same_grid(q)?;
    Ok(p.mass()
        .iter()
        .zip(q.mass())
        .filter(|(pi, _)| **pi > 0.0)
        .map(|(pi, qi)| pi * (pi / qi.max(KL_FLOOR)).ln())
        .sum())
}

/// Mean squared difference of densities (mass/h).
pub fn mse(p: &DensityEstimate, q: &DensityEstimate) -> Result<f64> {
    p.check_same_grid(q)?;
    let h = p.grid().spacing();
    let n = p.mass().len() as f64;
    Ok(p.mass().iter().zip(q.mass()).map(|(a, b)| ((a - b) / h).powi(2)).sum::<f64>() / n)
}

/// Mass held by cells whose density (mass/h) exceeds `tau`.
pub fn coverage(p: &DensityEstimate, tau: f64) -> Result<f64> {
    if !(tau >= 0.0) {
        return Err(Error::Input(format!("coverage threshold must be >= 0, got {tau}")));
    }
    let h = p.grid().spacing();
    Ok(p.mass().iter().filter(|m| **m / h > tau).sum())
}

/// Least-squares slope of `ln y` on `ln x`.
pub fn fit_power_law(xs: &[f64], ys: &[f64]) -> Result<f64> {
    if xs.len() != ys.len() || xs.len() < 3 {
        return Err(Error::Input("power-law fit needs >= 3 paired points".into()));
    }
    if xs.iter().chain(ys).any(|v| !(*v > 0.0 && v.is_finite())) {
        return Err(Error::Input("power-law fit needs positive finite data".into()));
    }
    let lx: Vec<f64> = xs.iter().map(|x| x.ln()).collect();
    let ly: Vec<f64> = ys.iter().map(|y| y.ln()).collect();
    let n = lx.len() as f64;
    let mx = lx.iter().sum::<f64>() / n;
    let my = ly.iter().sum::<f64>() / n;
    let sxx: f64 = lx.iter().map(|x| (x - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(Error::Input("power-law fit needs at least two distinct x values".into()));
    }
    let sxy: f64 = lx.iter().zip(&ly).map(|(x, y)| (x - mx) * (y - my)).sum();
    Ok(sxy / sxx)
}

/// Per-episode training record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeRecord {
    pub episode: usize,
    pub env_reward: f64,
    pub bonus: f64,
    pub entropy: f64,
    /// Fraction of the episode's steps spent near the global optimum.
    pub discovery_fraction: f64,
    /// Policy standard deviation at episode end (Gaussian agents only).
    pub sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunArtifacts {
    pub agent: String,
    pub seed: u64,
    pub horizon: usize,
    pub episodes: Vec<EpisodeRecord>,
}

impl RunArtifacts {
    pub fn rewards(&self) -> Vec<f64> {
        self.episodes.iter().map(|e| e.env_reward).collect()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Table1Summary {
    pub agent: String,
    pub seed: u64,
    pub mean_reward: f64,
    /// Population standard deviation over the final window.
    pub std_reward: f64,
    pub peak_reward: f64,
    pub global_rate: f64,
    /// Total environment reward per environment step.
    pub sample_efficiency: f64,
    pub final_entropy: f64,
}

pub fn table1_summary(run: &RunArtifacts) -> Result<Table1Summary> {
    let n = run.episodes.len();
    if n < FINAL_WINDOW {
        return Err(Error::Input(format!("summary needs >= {FINAL_WINDOW} episodes, run has {n}")));
    }
    let tail = &run.episodes[n - FINAL_WINDOW..];
    let w = FINAL_WINDOW as f64;
    let mean_reward = tail.iter().map(|e| e.env_reward).sum::<f64>() / w;
    let var = tail.iter().map(|e| (e.env_reward - mean_reward).powi(2)).sum::<f64>() / w;
    let total: f64 = run.episodes.iter().map(|e| e.env_reward).sum();
    Ok(Table1Summary {
        agent: run.agent.clone(),
        seed: run.seed,
        mean_reward,
        std_reward: var.sqrt(),
        peak_reward: run.episodes.iter().map(|e| e.env_reward).fold(f64::NEG_INFINITY, f64::max),
        global_rate: tail.iter().map(|e| e.discovery_fraction).sum::<f64>() / w,
        sample_efficiency: total / (n * run.horizon) as f64,
        final_entropy: run.episodes[n - 1].entropy,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::make_grid;
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    fn density(weights: Vec<f64>) -> DensityEstimate {
        let n = (weights.len() as f64).log2() as u32;
        DensityEstimate::from_weights(make_grid(0.0, 1.0, n).unwrap(), weights).unwrap()
    }

    fn run(rewards: &[f64], discovery: f64) -> RunArtifacts {
        RunArtifacts {
            agent: "x".into(),
            seed: 0,
            horizon: 10,
            episodes: rewards
                .iter()
                .enumerate()
                .map(|(i, &r)| EpisodeRecord {
                    episode: i,
                    env_reward: r,
                    bonus: 0.0,
                    entropy: 1.0,
                    discovery_fraction: discovery,
                    sigma: None,
                })
                .collect(),
        }
    }

    #[test]
    fn smooth_examples() {
        assert_eq!(smooth(&[3.0; 5], 25).unwrap(), vec![3.0; 5]);
        let xs = [1.0, -2.0, 7.5];
        assert_eq!(smooth(&xs, 1).unwrap(), xs.to_vec());
        assert_eq!(smooth(&[0.0, 10.0], 2).unwrap(), vec![0.0, 5.0]);
        assert!(smooth(&[], 3).unwrap().is_empty());
        assert!(smooth(&[1.0], 0).is_err());
    }

    #[test]
    fn entropy_examples() {
        assert_abs_diff_eq!(policy_entropy(0.0, 1), 1.4189, epsilon = 1e-4);
        assert_abs_diff_eq!(policy_entropy(0.0, 2), 2.8379, epsilon = 1e-4);
        assert!(policy_entropy(0.1, 2) > policy_entropy(0.0, 2));
    }

    #[test]
    fn kl_examples() {
        let p = density(vec![0.5, 0.5, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0]);
        let q = density(vec![1.0; 8]);
        assert_abs_diff_eq!(kl_divergence(&q, &q).unwrap(), 0.0, epsilon = 1e-15);
        assert_abs_diff_eq!(kl_divergence(&p, &q).unwrap(), 4f64.ln(), epsilon = 1e-12);
        let other = DensityEstimate::uniform(make_grid(0.0, 2.0, 3).unwrap());
        assert!(kl_divergence(&p, &other).is_err());
    }

    #[test]
    fn kl_four_cell_example() {
        // Same arithmetic as the two-of-four case: ln(0.5/0.25) = ln 2.
        let g = make_grid(0.0, 3.0, 3).unwrap();
        let mut mass = vec![0.0; 8];
        mass[0] = 0.25;
        mass[1] = 0.25;
        mass[2] = 0.25;
        mass[3] = 0.25;
        let p = DensityEstimate::new(g.clone(), mass).unwrap();
        let q = DensityEstimate::from_weights(g, vec![1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0, 1.0]).unwrap();
        assert_abs_diff_eq!(kl_divergence(&p, &q).unwrap(), 2f64.ln(), epsilon = 1e-12);
    }

    #[test]
    fn mse_examples() {
        let q = density(vec![1.0; 8]);
        assert_eq!(mse(&q, &q).unwrap(), 0.0);
        // Two cells of width 1: delta vs uniform.
        let g = crate::grid::Grid1D::new(0.0, 1.0, 3).unwrap();
        let h = g.spacing();
        let mut m = vec![0.0; 8];
        m[0] = 1.0;
        let delta = DensityEstimate::new(g.clone(), m).unwrap();
        let uni = DensityEstimate::uniform(g);
        let expected = ((1.0 - 0.125f64).powi(2) + 7.0 * 0.125f64.powi(2)) / 8.0 / (h * h);
        assert_abs_diff_eq!(mse(&delta, &uni).unwrap(), expected, epsilon = 1e-12);
    }

    #[test]
    fn coverage_examples() {
        let q = density(vec![1.0; 8]);
        let u = q.mass()[0] / q.grid().spacing();
        assert_abs_diff_eq!(coverage(&q, 0.0).unwrap(), 1.0, epsilon = 1e-12);
        assert_eq!(coverage(&q, 2.0 * u).unwrap(), 0.0);
        assert_abs_diff_eq!(coverage(&q, u / 2.0).unwrap(), 1.0, epsilon = 1e-12);
        let p = density(vec![1.0, 0.0, 0.0, 0.0, 0.0, 0.0, 0.0, 3.0]);
        assert_abs_diff_eq!(coverage(&p, 0.0).unwrap(), 1.0, epsilon = 1e-12);
        assert!(coverage(&p, -1.0).is_err());
    }

    #[test]
    fn power_law_examples() {
        let xs: Vec<f64> = (1..=6).map(|i| i as f64).collect();
        let sq: Vec<f64> = xs.iter().map(|x| x * x).collect();
        assert_abs_diff_eq!(fit_power_law(&xs, &sq).unwrap(), 2.0, epsilon = 1e-9);
        let p35: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(0.35)).collect();
        assert_abs_diff_eq!(fit_power_law(&xs, &p35).unwrap(), 0.35, epsilon = 1e-9);
        assert!(fit_power_law(&xs[..2], &sq[..2]).is_err());
        assert!(fit_power_law(&[1.0, 2.0, 0.0], &[1.0, 2.0, 3.0]).is_err());
    }

    #[test]
    fn power_law_with_noise() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(2);
        let xs: Vec<f64> = (0..20).map(|i| 10f64.powf(i as f64 / 19.0 * 3.0)).collect();
        let ys: Vec<f64> = xs.iter().map(|x| x * (1.0 + 0.01 * rng.random_range(-1.0..1.0))).collect();
        assert_abs_diff_eq!(fit_power_law(&xs, &ys).unwrap(), 1.0, epsilon = 0.05);
    }

    #[test]
    fn summary_examples() {
        let s = table1_summary(&run(&[7.0; 100], 0.0)).unwrap();
        assert_eq!((s.mean_reward, s.std_reward, s.peak_reward, s.global_rate), (7.0, 0.0, 7.0, 0.0));
        assert_abs_diff_eq!(s.sample_efficiency, 0.7, epsilon = 1e-12);
        let ramp: Vec<f64> = (0..400).map(|i| i as f64).collect();
        let s = table1_summary(&run(&ramp, 0.25)).unwrap();
        assert_eq!(s.peak_reward, 399.0);
        assert_eq!(s.global_rate, 0.25);
        assert!(table1_summary(&run(&[1.0; 79], 0.0)).is_err());
    }

    fn density_strategy() -> impl Strategy<Value = DensityEstimate> {
        prop::collection::vec(0.0f64..10.0, 16).prop_filter_map("positive total", |w| {
            DensityEstimate::from_weights(make_grid(-1.0, 1.0, 4).unwrap(), w).ok()
        })
    }

    proptest! {
        #[test]
        fn kl_is_nonnegative_and_zero_on_self(p in density_strategy(), q in density_strategy()) {
            prop_assert!(kl_divergence(&p, &p).unwrap().abs() < 1e-12);
            prop_assert!(kl_divergence(&p, &q).unwrap() >= -1e-12);
        }

        #[test]
        fn coverage_non_increasing(p in density_strategy(), a in 0.0f64..5.0, b in 0.0f64..5.0) {
            let (lo, hi) = if a <= b { (a, b) } else { (b, a) };
            prop_assert!(coverage(&p, hi).unwrap() <= coverage(&p, lo).unwrap() + 1e-15);
        }

        #[test]
        fn smooth_bounded_by_running_max(xs in prop::collection::vec(-100.0f64..100.0, 1..60), w in 1usize..30) {
            let s = smooth(&xs, w).unwrap();
            let mut running = f64::NEG_INFINITY;
            for (x, y) in xs.iter().zip(&s) {
                running = running.max(*x);
                prop_assert!(*y <= running + 1e-9);
            }
        }

        #[test]
        fn smooth_keeps_constant(c in -50.0f64..50.0, n in 1usize..40, w in 1usize..30) {
            let s = smooth(&vec![c; n], w).unwrap();
            prop_assert!(s.iter().all(|y| (y - c).abs() <= 1e-12 * c.abs().max(1.0)));
        }

        #[test]
        fn power_law_scale_invariant(k in 0.1f64..3.0, a in 0.01f64..100.0, b in 0.01f64..100.0) {
            let xs: Vec<f64> = (1..8).map(|i| i as f64).collect();
            let ys: Vec<f64> = xs.iter().map(|x| x.powf(k) * (1.0 + 0.1 * (x * 7.0).sin())).collect();
            let base = fit_power_law(&xs, &ys).unwrap();
            let xs2: Vec<f64> = xs.iter().map(|x| a * x).collect();
            let ys2: Vec<f64> = ys.iter().map(|y| b * y).collect();
            prop_assert!((fit_power_law(&xs2, &ys2).unwrap() - base).abs() < 1e-9);
        }
    }
}
