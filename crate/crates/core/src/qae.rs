//! Quantum-inspired estimation of Boltzmann densities and partition functions.
//!
//! Two independent pieces live here:
//!
//! * [`annealed_qae`]: classical emulation of temperature-annealed amplitude
//!   amplification. Amplitudes `e^{−βV/2}` are reflected about their mean,
//!   clamped at zero and renormalized; squared amplitudes are accumulated over
//!   an inverse-temperature schedule.
//! * [`PartitionProblem`]: the discrete partition function
//!   `Z_N = h·Σ e^{−V(xᵢ)/D}` with two estimators, uniform-sampling Monte
//!   Carlo and a phase-estimation error model, plus the query accounting used
//!   to compare their precision/cost curves.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::density::DensityEstimate;
use crate::error::{Error, Result};
use crate::grid::Grid1D;
use crate::potential::{eval_potential, Potential};
use crate::seeding::rng_for;

/// Unit-L2-norm vector of nonnegative amplitudes.
#[derive(Debug, Clone, PartialEq)]
pub struct AmplitudeVector(Vec<f64>);

impl AmplitudeVector {
    pub fn uniform(n: usize) -> Self {
        AmplitudeVector(vec![1.0 / (n as f64).sqrt(); n])
    }

    /// Normalizes nonnegative values; falls back to uniform when all are zero.
    pub fn normalized(values: Vec<f64>) -> Self {
        let norm = values.iter().map(|v| v * v).sum::<f64>().sqrt();
        if norm > 0.0 && norm.is_finite() {
            AmplitudeVector(values.into_iter().map(|v| v / norm).collect())
        } else {
            Self::uniform(values.len())
        }
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().map(|v| v * v).sum::<f64>().sqrt()
    }

    pub fn probabilities(&self) -> impl Iterator<Item = f64> + '_ {
        self.0.iter().map(|a| a * a)
    }
}

/// `a ∝ e^{−β(V − min V)/2}`, unit norm.
pub fn prepare_amplitudes(v_values: &[f64], beta: f64) -> Result<AmplitudeVector> {
    if v_values.is_empty() {
        return Err(Error::Input("empty potential vector".into()));
    }
    if let Some(index) = v_values.iter().position(|v| !v.is_finite()) {
        return Err(Error::Numeric { index, value: v_values[index] });
    }
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::Config(format!("beta must be positive, got {beta}")));
    }
    let min = v_values.iter().copied().fold(f64::INFINITY, f64::min);
    let weights: Vec<f64> = v_values.iter().map(|v| (-0.5 * beta * (v - min)).exp()).collect();
    // The minimum cell always has weight 1, so the norm cannot vanish.
    Ok(AmplitudeVector::normalized(weights))
}

/// Inversion about the mean, clamped to nonnegative values and renormalized.
pub fn grover_step(a: &AmplitudeVector) -> AmplitudeVector {
    let mean = a.0.iter().sum::<f64>() / a.len() as f64;
    let reflected = a.0.iter().map(|&v| (2.0 * mean - v).max(0.0)).collect();
    AmplitudeVector::normalized(reflected)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct QaeConfig {
    /// Final inverse temperature.
    pub beta: f64,
    pub n_qubits: u32,
    pub grover_iters: u32,
    pub anneal_steps: u32,
    /// First schedule temperature as a fraction of `beta`.
    pub anneal_start_fraction: f64,
    /// Mean-reflections applied per Grover iterate. A Grover iterate is a
    /// product of two reflections, so the default is 2; set 1 to apply a
    /// single reflection per iterate.
    pub reflections_per_iter: u32,
    pub lower: f64,
    pub upper: f64,
}

impl Default for QaeConfig {
    fn default() -> Self {
        Self {
            beta: 1.5,
            n_qubits: 7,
            grover_iters: 5,
            anneal_steps: 6,
            anneal_start_fraction: 0.3,
            reflections_per_iter: 2,
            lower: -3.0,
            upper: 3.0,
        }
    }
}

impl QaeConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.beta > 0.0 && self.beta.is_finite()) {
            return Err(Error::Config("qae.beta must be positive".into()));
        }
        if self.anneal_steps < 1 {
            return Err(Error::Config("qae.anneal_steps must be >= 1".into()));
        }
        if !(self.anneal_start_fraction > 0.0 && self.anneal_start_fraction <= 1.0) {
            return Err(Error::Config("qae.anneal_start_fraction must be in (0, 1]".into()));
        }
        Ok(())
    }

    pub fn grid(&self) -> Result<Grid1D> {
        Grid1D::new(self.lower, self.upper, self.n_qubits)
    }

    /// Inverse temperatures `linspace(f·β, β, steps)`.
    pub fn schedule(&self) -> Vec<f64> {
        let start = self.anneal_start_fraction * self.beta;
        let steps = self.anneal_steps as usize;
        if steps == 1 {
            return vec![start];
        }
        (0..steps).map(|i| start + (self.beta - start) * i as f64 / (steps - 1) as f64).collect()
    }

    /// Mean-reflection count times grid size, summed over the schedule.
    pub fn reflection_work(&self) -> u64 {
        let n = 1u64 << self.n_qubits;
        self.anneal_steps as u64 * self.grover_iters as u64 * self.reflections_per_iter as u64 * n
    }
}

/// Temperature-annealed amplitude estimate of `ρ* ∝ e^{−βV}` on `g`.
pub fn annealed_qae(p: &Potential, g: &Grid1D, cfg: &QaeConfig) -> Result<DensityEstimate> {
    let v = eval_potential(p, g)?;
    annealed_qae_values(&v, g, cfg)
}

/// [`annealed_qae`] on precomputed potential values.
pub fn annealed_qae_values(v: &[f64], g: &Grid1D, cfg: &QaeConfig) -> Result<DensityEstimate> {
    cfg.validate()?;
    if v.len() != g.len() {
        return Err(Error::Input("potential/grid length mismatch".into()));
    }
    let mut acc = vec![0.0; g.len()];
    for beta_i in cfg.schedule() {
        let mut a = prepare_amplitudes(v, beta_i)?;
        for _ in 0..cfg.grover_iters * cfg.reflections_per_iter {
            a = grover_step(&a);
        }
        acc.iter_mut().zip(a.probabilities()).for_each(|(s, p)| *s += p);
    }
    DensityEstimate::from_weights(g.clone(), acc)
}

/// Estimation method for partition-function query accounting.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Method {
    ClassicalMC,
    SimulatedQae,
}

impl Method {
    pub fn name(self) -> &'static str {
        match self {
            Method::ClassicalMC => "classical_mc",
            Method::SimulatedQae => "simulated_qae",
        }
    }
}

/// Cost to reach a target additive precision on `Z_N`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ComplexityPoint {
    pub method: Method,
    pub epsilon: f64,
    pub queries: u64,
    /// Error met by the success-threshold fraction of trials.
    pub achieved_error: f64,
    pub success_rate: f64,
}

/// Weight table for `Z_N = h·Σ e^{−V(xᵢ)/D}`.
///
/// Weights are stored as `pᵢ = e^{−(Vᵢ − min V)/D} ∈ (0, 1]`, i.e. already
/// divided by `M = max e^{−V/D}`, so `Z_N = N·M·h·mean(p)`.
#[derive(Debug, Clone)]
pub struct PartitionProblem {
    weights: Vec<f64>,
    /// `N·M·h`.
    scale: f64,
    exact: f64,
}

impl PartitionProblem {
    pub fn new(p: &Potential, d_coeff: f64, g: &Grid1D) -> Result<Self> {
        let v = eval_potential(p, g)?;
        // RewardSlice values carry a grid shift; undo it so Z refers to the raw potential.
        let offset = match p {
            Potential::RewardSlice => g.points().iter().map(|&x| p.value(x)).fold(f64::INFINITY, f64::min),
            _ => 0.0,
        };
        Self::from_values(&v, offset, d_coeff, g)
    }

    fn from_values(v: &[f64], offset: f64, d_coeff: f64, g: &Grid1D) -> Result<Self> {
        if !(d_coeff > 0.0 && d_coeff.is_finite()) {
            return Err(Error::Config(format!("diffusion must be positive, got {d_coeff}")));
        }
        let min = v.iter().copied().fold(f64::INFINITY, f64::min);
        let weights: Vec<f64> = v.iter().map(|x| (-(x - min) / d_coeff).exp()).collect();
        let big_m = (-(min + offset) / d_coeff).exp();
        if !big_m.is_finite() {
            return Err(Error::Numeric { index: 0, value: big_m });
        }
        let n = weights.len() as f64;
        let scale = n * big_m * g.spacing();
        let exact = scale * weights.iter().sum::<f64>() / n;
        Ok(Self { weights, scale, exact })
    }

    /// Exact `Z_N` by full grid summation.
    pub fn exact(&self) -> f64 {
        self.exact
    }

    /// `N·M·h`, the factor converting a mean weight into `Z_N`.
    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// True good-state angle: `sin²θ = Z_N / (N·M·h)`.
    pub fn theta(&self) -> f64 {
        (self.exact / self.scale).clamp(0.0, 1.0).sqrt().asin()
    }

    /// Standard deviation of a single-sample estimate `N·M·h·pⱼ`.
    pub fn single_sample_std(&self) -> f64 {
        let n = self.weights.len() as f64;
        let mean = self.weights.iter().sum::<f64>() / n;
        let var = self.weights.iter().map(|w| (w - mean).powi(2)).sum::<f64>() / n;
        self.scale * var.sqrt()
    }

    /// Uniform-sampling estimate from `k` grid draws.
    pub fn sample_mc<R: Rng + ?Sized>(&self, k: u64, rng: &mut R) -> f64 {
        let n = self.weights.len();
        let mut sum = 0.0;
        for _ in 0..k {
            sum += self.weights[rng.random_range(0..n)];
        }
        self.scale * sum / k as f64
    }

    /// Phase-estimation outcome with `m` ancilla bits.
    ///
    /// With probability `8/π²` the estimated angle lands within `π·2^{−m}` of
    /// the true angle (uniformly inside that window); otherwise the angle is
    /// drawn uniformly from `[0, π)`.
    pub fn sample_qae<R: Rng + ?Sized>(&self, m: u32, rng: &mut R) -> QaeOutcome {
        let theta = self.theta();
        let window = std::f64::consts::PI * 0.5f64.powi(m as i32);
        let success = rng.random::<f64>() < QPE_SUCCESS_PROBABILITY;
        let theta_hat = if success {
            theta + window * (2.0 * rng.random::<f64>() - 1.0)
        } else {
            std::f64::consts::PI * rng.random::<f64>()
        };
        QaeOutcome { estimate: self.scale * theta_hat.sin().powi(2), success, queries: 1u64 << m }
    }

    /// Additive error bound on `Z_N` for a successful phase estimate.
    pub fn qae_success_bound(&self, m: u32) -> f64 {
        2.0 * self.scale * std::f64::consts::PI * 0.5f64.powi(m as i32)
    }
}

/// Lower bound on the probability that phase estimation lands in the
/// nearest-neighbour window.
pub const QPE_SUCCESS_PROBABILITY: f64 = 8.0 / (std::f64::consts::PI * std::f64::consts::PI);

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QaeOutcome {
    pub estimate: f64,
    /// Whether the sampled phase fell in the nearest-neighbour window.
    pub success: bool,
    pub queries: u64,
}

/// Unbiased Monte Carlo estimate of `Z_N` from `k` uniform grid samples.
pub fn classical_mc_partition(p: &Potential, d_coeff: f64, g: &Grid1D, k: u64, seed: u64) -> Result<f64> {
    if k == 0 {
        return Err(Error::Input("k must be >= 1".into()));
    }
    let problem = PartitionProblem::new(p, d_coeff, g)?;
    Ok(problem.sample_mc(k, &mut rng_for(&[seed])))
}

/// Simulated amplitude-estimation estimate of `Z_N`; costs `2^m` oracle queries.
pub fn simulated_qae_partition(p: &Potential, d_coeff: f64, g: &Grid1D, m_ancilla: u32, seed: u64) -> Result<f64> {
    if m_ancilla == 0 {
        return Err(Error::Input("m_ancilla must be >= 1".into()));
    }
    let problem = PartitionProblem::new(p, d_coeff, g)?;
    Ok(problem.sample_qae(m_ancilla, &mut rng_for(&[seed])).estimate)
}

pub const MAX_CLASSICAL_QUERIES: u64 = 100_000_000;
pub const MAX_ANCILLA: u32 = 30;
pub const SUCCESS_THRESHOLD: f64 = 2.0 / 3.0;
pub const MIN_TRIALS: usize = 30;

/// Smallest cost at which at least two thirds of `trials` seeded runs land
/// within `epsilon` of `Z_N`. Classical cost doubles `k`; simulated QAE
/// increments the ancilla count (cost `2^m`).
pub fn queries_to_precision(
    method: Method,
    problem: &PartitionProblem,
    epsilon: f64,
    trials: usize,
    seed: u64,
) -> Result<ComplexityPoint> {
    if !(epsilon > 0.0) {
        return Err(Error::Input("epsilon must be positive".into()));
    }
    if trials < MIN_TRIALS {
        return Err(Error::Input(format!("need at least {MIN_TRIALS} trials")));
    }
    let exact = problem.exact();
    // QAE trials reuse the same streams at every ancilla count so that the
    // phase error shrinks by exactly half per extra bit (common random numbers).
    let evaluate = |level: u64, estimate: &dyn Fn(&mut rand_chacha::ChaCha8Rng) -> f64| {
        let stream = match method {
            Method::ClassicalMC => level,
            Method::SimulatedQae => 0,
        };
        let errors: Vec<f64> = (0..trials as u64)
            .map(|t| {
                let mut rng = rng_for(&[seed, method as u64, stream, t]);
                (estimate(&mut rng) - exact).abs()
            })
            .collect();
        let hits = errors.iter().filter(|&&e| e <= epsilon).count();
        // Error level reached by the success-threshold fraction of trials.
        let mut sorted = errors.clone();
        sorted.sort_by(f64::total_cmp);
        let rank = ((SUCCESS_THRESHOLD * trials as f64).ceil() as usize).clamp(1, trials) - 1;
        (hits as f64 / trials as f64, sorted[rank])
    };
    match method {
        Method::ClassicalMC => {
            let mut k = 1u64;
            while k <= MAX_CLASSICAL_QUERIES {
                let (rate, err) = evaluate(k, &|rng| problem.sample_mc(k, rng));
                if rate >= SUCCESS_THRESHOLD {
                    return Ok(ComplexityPoint {
                        method,
                        epsilon,
                        queries: k,
                        achieved_error: err,
                        success_rate: rate,
                    });
                }
                k *= 2;
            }
            Err(Error::Resource(format!("classical MC exceeded {MAX_CLASSICAL_QUERIES} samples at epsilon {epsilon}")))
        }
        Method::SimulatedQae => {
            for m in 1..=MAX_ANCILLA {
                let (rate, err) = evaluate(m as u64, &|rng| problem.sample_qae(m, rng).estimate);
                if rate >= SUCCESS_THRESHOLD {
                    return Ok(ComplexityPoint {
                        method,
                        epsilon,
                        queries: 1u64 << m,
                        achieved_error: err,
                        success_rate: rate,
                    });
                }
            }
            Err(Error::Resource(format!("simulated QAE exceeded {MAX_ANCILLA} ancillas at epsilon {epsilon}")))
        }
    }
}
