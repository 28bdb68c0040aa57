use std::hint::black_box;
use std::path::PathBuf;
use std::time::Instant;

use rand::Rng;
use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{write_csv, write_json};
use super::training::train_agent;
use crate::density::DensityEstimate;
use crate::env::EnvConfig;
use crate::error::{Error, Result};
use crate::fp::{drift_field_2d, evolve_fp_with, stationary_2d, stationary_analytic, EvolveOptions};
use crate::grid::{Grid1D, Grid2D};
use crate::metrics::{coverage, fit_power_law, kl_divergence, mse};
use crate::potential::{eval_potential, Potential};
use crate::qae::{annealed_qae, queries_to_precision, ComplexityPoint, Method, PartitionProblem, QaeConfig};
use crate::seeding::rng_for;

// ---------------------------------------------------------------- complexity

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexityRow {
    pub method: String,
    pub epsilon: f64,
    pub queries: u64,
    pub achieved_error: f64,
    pub success_rate: f64,
}

impl From<&ComplexityPoint> for ComplexityRow {
    fn from(p: &ComplexityPoint) -> Self {
        Self {
            method: p.method.name().into(),
            epsilon: p.epsilon,
            queries: p.queries,
            achieved_error: p.achieved_error,
            success_rate: p.success_rate,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ComplexitySummary {
    pub exact_partition: f64,
    pub trials: usize,
    pub classical_slope: f64,
    pub quantum_slope: f64,
    /// Classical over quantum queries, in sweep order.
    pub query_ratios: Vec<f64>,
    pub ratio_increases_as_epsilon_shrinks: bool,
    pub points: Vec<ComplexityRow>,
}

/// Queries-to-precision sweep for both estimators plus fitted slopes of
/// `queries` against `1/ε`.
pub fn run_complexity(cfg: &ExperimentConfig) -> Result<(ComplexitySummary, Vec<PathBuf>)> {
    cfg.validate()?;
    let c = &cfg.complexity;
    let grid = Grid1D::new(c.lower, c.upper, c.n_qubits)?;
    let problem = PartitionProblem::new(&c.potential, c.d_coeff, &grid)?;
    let seed = cfg.seeds[0];
    let mut eps = c.epsilons.clone();
    eps.sort_by(|a, b| b.total_cmp(a));

    let mut classical = Vec::new();
    let mut quantum = Vec::new();
    for &e in &eps {
        classical.push(queries_to_precision(Method::ClassicalMC, &problem, e, c.trials, seed)?);
        quantum.push(queries_to_precision(Method::SimulatedQae, &problem, e, c.trials, seed)?);
    }
    let inv: Vec<f64> = eps.iter().map(|e| 1.0 / e).collect();
    let slope =
        |pts: &[ComplexityPoint]| fit_power_law(&inv, &pts.iter().map(|p| p.queries as f64).collect::<Vec<_>>());
    let ratios: Vec<f64> = classical.iter().zip(&quantum).map(|(a, b)| a.queries as f64 / b.queries as f64).collect();
    let points: Vec<ComplexityRow> = classical.iter().chain(&quantum).map(ComplexityRow::from).collect();
    let summary = ComplexitySummary {
        exact_partition: problem.exact(),
        trials: c.trials,
        classical_slope: slope(&classical)?,
        quantum_slope: slope(&quantum)?,
        ratio_increases_as_epsilon_shrinks: ratios.windows(2).all(|w| w[1] > w[0]),
        query_ratios: ratios,
        points,
    };
    let dir = &cfg.output_dir;
    let files = vec![write_csv(dir, "complexity.csv", &summary.points)?, write_json(dir, "complexity.json", &summary)?];
    Ok((summary, files))
}

// ------------------------------------------------------------------- scaling

/// Monte Carlo estimate of the `dim`-fold product partition function
/// `Π Z_N` from `k` uniformly drawn grid multi-indices; each sample costs
/// `dim` potential evaluations.
pub fn classical_mc_partition_nd(p: &Potential, d_coeff: f64, g: &Grid1D, dim: usize, k: u64, seed: u64) -> f64 {
    let mut rng = rng_for(&[seed, dim as u64]);
    let points = g.points();
    let n = points.len();
    let mut sum = 0.0;
    for _ in 0..k {
        let mut log_w = 0.0;
        for _ in 0..dim {
            log_w -= p.value(points[rng.random_range(0..n)]) / d_coeff;
        }
        sum += log_w.exp();
    }
    (n as f64 * g.spacing()).powi(dim as i32) * sum / k as f64
}

/// Bonus lookups for `steps` agent steps in `dim` dimensions, refreshing the
/// 1D density estimate every `refresh` steps. Returns the summed bonus.
fn quantum_pipeline(
    p: &Potential,
    qae: &QaeConfig,
    dim: usize,
    steps: usize,
    refresh: usize,
    seed: u64,
) -> Result<f64> {
    let grid = qae.grid()?;
    let mut rng = rng_for(&[seed, dim as u64]);
    let mut density = annealed_qae(p, &grid, qae)?;
    let mut total = 0.0;
    for t in 0..steps {
        if t > 0 && t % refresh == 0 {
            density = annealed_qae(p, &grid, qae)?;
        }
        for _ in 0..dim {
            let x = rng.random_range(qae.lower..qae.upper);
            total += crate::agents::exploration_bonus(density.mass_at(x), 1.0);
        }
    }
    Ok(total)
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingWorkRow {
    pub dim: usize,
    /// Amplitude updates plus potential evaluations plus bonus lookups.
    pub quantum_work: u64,
    /// Potential evaluations.
    pub classical_work: u64,
    pub classical_samples: u64,
    pub classical_estimate: f64,
    pub exact_partition: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingTimingRow {
    pub dim: usize,
    pub quantum_seconds: f64,
    pub classical_seconds: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingWorkSummary {
    pub quantum_work_exponent: f64,
    pub classical_work_exponent: f64,
    pub rows: Vec<ScalingWorkRow>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScalingTimingSummary {
    pub repetitions: usize,
    pub quantum_exponent: f64,
    pub classical_exponent: f64,
    pub rows: Vec<ScalingTimingRow>,
}

fn median(mut xs: Vec<f64>) -> f64 {
    xs.sort_by(f64::total_cmp);
    let n = xs.len();
    if n % 2 == 1 {
        xs[n / 2]
    } else {
        0.5 * (xs[n / 2 - 1] + xs[n / 2])
    }
}

/// Timing (median of repetitions) and deterministic work counts of the
/// projected density pipeline against `d`-dimensional Monte Carlo.
pub fn run_scaling(cfg: &ExperimentConfig) -> Result<(ScalingWorkSummary, ScalingTimingSummary, Vec<PathBuf>)> {
    cfg.validate()?;
    let s = &cfg.scaling;
    let seed = cfg.seeds[0];
    let qae = QaeConfig { beta: cfg.qff.beta, ..cfg.qae.clone() };
    let grid = qae.grid()?;
    let refresh = cfg.qff.qae_refresh;
    let k = (1.0 / (s.epsilon * s.epsilon)).ceil() as u64;
    let z1 = PartitionProblem::new(&s.potential, s.d_coeff, &grid)?.exact();
    let refreshes = s.step_budget.div_ceil(refresh) as u64;
    let per_refresh = qae.reflection_work() + grid.len() as u64;

    let mut dims = s.dims.clone();
    dims.sort();
    dims.dedup();
    let mut work = Vec::new();
    let mut timing = Vec::new();
    for &dim in &dims {
        let mut q_times = Vec::new();
        let mut c_times = Vec::new();
        let mut estimate = 0.0;
        for _ in 0..s.repetitions {
            let t0 = Instant::now();
            black_box(quantum_pipeline(&s.potential, &qae, dim, s.step_budget, refresh, seed)?);
            q_times.push(t0.elapsed().as_secs_f64());
            let t0 = Instant::now();
            estimate = black_box(classical_mc_partition_nd(&s.potential, s.d_coeff, &grid, dim, k, seed));
            c_times.push(t0.elapsed().as_secs_f64());
        }
        work.push(ScalingWorkRow {
            dim,
            quantum_work: refreshes * per_refresh + (s.step_budget * dim) as u64,
            classical_work: k * dim as u64,
            classical_samples: k,
            classical_estimate: estimate,
            exact_partition: z1.powi(dim as i32),
        });
        timing.push(ScalingTimingRow { dim, quantum_seconds: median(q_times), classical_seconds: median(c_times) });
    }
    let xs: Vec<f64> = dims.iter().map(|&d| d as f64).collect();
    let fit = |ys: Vec<f64>| fit_power_law(&xs, &ys);
    let work_summary = ScalingWorkSummary {
        quantum_work_exponent: fit(work.iter().map(|r| r.quantum_work as f64).collect())?,
        classical_work_exponent: fit(work.iter().map(|r| r.classical_work as f64).collect())?,
        rows: work,
    };
    let timing_summary = ScalingTimingSummary {
        repetitions: s.repetitions,
        quantum_exponent: fit(timing.iter().map(|r| r.quantum_seconds).collect())?,
        classical_exponent: fit(timing.iter().map(|r| r.classical_seconds).collect())?,
        rows: timing,
    };
    let dir = &cfg.output_dir;
    let files = vec![
        write_csv(dir, "scaling_work.csv", &work_summary.rows)?,
        write_json(dir, "scaling_work.json", &work_summary)?,
        write_csv(dir, "scaling_timing.csv", &timing_summary.rows)?,
        write_json(dir, "scaling_timing.json", &timing_summary)?,
    ];
    Ok((work_summary, timing_summary, files))
}

// ------------------------------------------------------------ qubit ablation

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationRow {
    pub n_qubits: u32,
    /// Against the Boltzmann density at the estimator's own temperature `1/β`.
    pub mse: f64,
    /// Against the Boltzmann density at the configured diffusion coefficient.
    pub mse_d_coeff: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AblationSummary {
    pub beta: f64,
    pub d_coeff: f64,
    pub rows: Vec<AblationRow>,
}

impl AblationSummary {
    pub fn mse_at(&self, n: u32) -> Option<f64> {
        self.rows.iter().find(|r| r.n_qubits == n).map(|r| r.mse)
    }
}

/// Estimator-vs-analytic mean squared density error per qubit count.
pub fn run_qubit_ablation(cfg: &ExperimentConfig) -> Result<(AblationSummary, Vec<PathBuf>)> {
    cfg.validate()?;
    let a = &cfg.ablation;
    let mut qubits = a.qubits.clone();
    qubits.sort();
    qubits.dedup();
    let mut rows = Vec::new();
    for &n in &qubits {
        let qae = QaeConfig { n_qubits: n, ..cfg.qae.clone() };
        let grid = qae.grid()?;
        let estimate = annealed_qae(&a.potential, &grid, &qae)?;
        let own = stationary_analytic(&a.potential, 1.0 / qae.beta, &grid)?;
        let configured = stationary_analytic(&a.potential, a.d_coeff, &grid)?;
        rows.push(AblationRow { n_qubits: n, mse: mse(&estimate, &own)?, mse_d_coeff: mse(&estimate, &configured)? });
    }
    let summary = AblationSummary { beta: cfg.qae.beta, d_coeff: a.d_coeff, rows };
    let dir = &cfg.output_dir;
    let files =
        vec![write_csv(dir, "qubit_ablation.csv", &summary.rows)?, write_json(dir, "qubit_ablation.json", &summary)?];
    Ok((summary, files))
}

// ------------------------------------------------------------- mode collapse

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct KlRow {
    pub agent: String,
    pub seed: u64,
    pub episode: usize,
    pub kl: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CoverageRow {
    pub agent: String,
    pub seed: u64,
    pub tau: f64,
    pub coverage: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VisitRow {
    pub agent: String,
    pub seed: u64,
    pub x: f64,
    pub visit_mass: f64,
    pub stationary_mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCollapseAgentSummary {
    pub agent: String,
    /// Mean over seeds of the last KL evaluation.
    pub final_kl: f64,
    /// Mean over seeds, one entry per threshold.
    pub coverage: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ModeCollapseSummary {
    pub taus: Vec<f64>,
    pub agents: Vec<ModeCollapseAgentSummary>,
}

impl ModeCollapseSummary {
    pub fn agent(&self, name: &str) -> Option<&ModeCollapseAgentSummary> {
        self.agents.iter().find(|a| a.agent == name)
    }
}

/// Trains the configured agents on the 1D task with reward `−V(x)` and
/// compares their state-visitation histograms with the Boltzmann density.
pub fn run_mode_collapse(cfg: &ExperimentConfig) -> Result<(ModeCollapseSummary, Vec<PathBuf>)> {
    cfg.validate()?;
    let mc = &cfg.mode_collapse;
    let env = EnvConfig { horizon: mc.horizon, ..EnvConfig::one_dimensional(mc.potential.clone()) };
    let grid = cfg.qae.grid()?;
    let target = stationary_analytic(&mc.potential, cfg.qff.d_coeff, &grid)?;
    let mut agents = mc.agents.clone();
    agents.sort();
    agents.dedup();
    let mut seeds = cfg.seeds.clone();
    seeds.sort();
    seeds.dedup();

    let mut kl_rows = Vec::new();
    let mut cov_rows = Vec::new();
    let mut visit_rows = Vec::new();
    let mut summaries = Vec::new();
    for &kind in &agents {
        let mut final_kls = Vec::new();
        let mut covs = vec![0.0; mc.taus.len()];
        for &seed in &seeds {
            let mut window: Vec<f64> = Vec::new();
            let mut tail: Vec<f64> = Vec::new();
            let mut curve: Vec<(usize, f64)> = Vec::new();
            let mut failure: Option<Error> = None;
            let tail_start = mc.episodes.saturating_sub(mc.final_window);
            train_agent(kind, seed, &env, cfg, mc.episodes, |s| {
                window.push(s.state[0]);
                if s.episode >= tail_start {
                    tail.push(s.state[0]);
                }
                if s.done && (s.episode + 1) % mc.eval_every == 0 {
                    let kl = DensityEstimate::from_samples(grid.clone(), &window)
                        .and_then(|visits| kl_divergence(&target, &visits));
                    match kl {
                        Ok(kl) => curve.push((s.episode + 1, kl)),
                        Err(e) => failure = Some(e),
                    }
                    window.clear();
                }
            })?;
            if let Some(e) = failure {
                return Err(e);
            }
            let visits = DensityEstimate::from_samples(grid.clone(), &tail)?;
            final_kls.push(curve.last().map_or_else(|| kl_divergence(&target, &visits), |c| Ok(c.1))?);
            for (episode, kl) in curve {
                kl_rows.push(KlRow { agent: kind.name().into(), seed, episode, kl });
            }
            for (i, &tau) in mc.taus.iter().enumerate() {
                let c = coverage(&visits, tau)?;
                covs[i] += c / seeds.len() as f64;
                cov_rows.push(CoverageRow { agent: kind.name().into(), seed, tau, coverage: c });
            }
            for (i, &x) in grid.points().iter().enumerate() {
                visit_rows.push(VisitRow {
                    agent: kind.name().into(),
                    seed,
                    x,
                    visit_mass: visits.mass()[i],
                    stationary_mass: target.mass()[i],
                });
            }
        }
        summaries.push(ModeCollapseAgentSummary {
            agent: kind.name().into(),
            final_kl: final_kls.iter().sum::<f64>() / final_kls.len() as f64,
            coverage: covs,
        });
    }
    let summary = ModeCollapseSummary { taus: mc.taus.clone(), agents: summaries };
    let dir = &cfg.output_dir;
    let files = vec![
        write_csv(dir, "mode_collapse_kl.csv", &kl_rows)?,
        write_csv(dir, "mode_collapse_coverage.csv", &cov_rows)?,
        write_csv(dir, "mode_collapse_visits.csv", &visit_rows)?,
        write_json(dir, "mode_collapse.json", &summary)?,
    ];
    Ok((summary, files))
}

// ------------------------------------------------------------------ fp solve

#[derive(Debug, Clone, PartialEq, Serialize)]
struct EvolutionRow {
    t: f64,
    x: f64,
    mass: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct StationaryRow {
    x: f64,
    analytic: f64,
    evolved: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct FieldRow {
    x1: f64,
    x2: f64,
    value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
struct DriftRow {
    x1: f64,
    x2: f64,
    u: f64,
    v: f64,
    magnitude: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct FpSolveSummary {
    pub dt: f64,
    pub t_final: f64,
    pub snapshots: usize,
    pub converged_early: bool,
    pub max_mass_error: f64,
    pub min_mass: f64,
    pub final_l1_to_analytic: f64,
    pub marginal_x1_max_error: f64,
    pub local_maxima_2d: usize,
}

/// Time evolution from a uniform start, plus the separable 2D stationary
/// density and drift field.
pub fn run_fp_solve(cfg: &ExperimentConfig) -> Result<(FpSolveSummary, Vec<PathBuf>)> {
    cfg.validate()?;
    let f = &cfg.fp_solve;
    let grid = Grid1D::new(f.lower, f.upper, f.n_qubits)?;
    let analytic = stationary_analytic(&f.potential, f.d_coeff, &grid)?;
    let opts = EvolveOptions { snapshots: f.snapshots, ..EvolveOptions::default() };
    let trace = evolve_fp_with(&f.potential, f.d_coeff, &grid, &DensityEstimate::uniform(grid.clone()), f.t_end, opts)?;
    let last = trace.last();

    let g1 = Grid1D::new(f.lower, f.upper, f.n_qubits_2d)?;
    let g2 = Grid2D::new(g1.clone(), g1.clone());
    let field = stationary_2d(&f.potential, &f.potential_x2, f.d_coeff, &g2)?;
    let drift = drift_field_2d(&f.potential, &f.potential_x2, &g2);
    let marginal = stationary_analytic(&f.potential, f.d_coeff, &g1)?;
    let marginal_err = field.marginal_x1().iter().zip(marginal.mass()).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);

    let summary = FpSolveSummary {
        dt: trace.dt,
        t_final: *trace.times.last().expect("trace is never empty"),
        snapshots: trace.snapshots.len(),
        converged_early: trace.converged_early,
        max_mass_error: trace.snapshots.iter().map(|s| (s.mass().iter().sum::<f64>() - 1.0).abs()).fold(0.0, f64::max),
        min_mass: trace.snapshots.iter().flat_map(|s| s.mass().iter().copied()).fold(f64::INFINITY, f64::min),
        final_l1_to_analytic: last.l1_distance(&analytic)?,
        marginal_x1_max_error: marginal_err,
        local_maxima_2d: field.local_maxima().len(),
    };

    let evolution: Vec<EvolutionRow> = trace
        .times
        .iter()
        .zip(&trace.snapshots)
        .flat_map(|(&t, s)| grid.points().iter().zip(s.mass()).map(move |(&x, &mass)| EvolutionRow { t, x, mass }))
        .collect();
    let stationary: Vec<StationaryRow> = grid
        .points()
        .iter()
        .zip(analytic.mass().iter().zip(last.mass()))
        .map(|(&x, (&analytic, &evolved))| StationaryRow { x, analytic, evolved })
        .collect();
    let fields: Vec<FieldRow> = g2.iter().map(|(i, j, x1, x2)| FieldRow { x1, x2, value: field.at(i, j) }).collect();
    let drifts: Vec<DriftRow> = g2
        .iter()
        .enumerate()
        .map(|(k, (_, _, x1, x2))| {
            let (u, v) = (drift.u[k], drift.v[k]);
            DriftRow { x1, x2, u, v, magnitude: u.hypot(v) }
        })
        .collect();
    let potential_rows: Vec<FieldRow> = grid
        .points()
        .iter()
        .zip(eval_potential(&f.potential, &grid)?)
        .map(|(&x, value)| FieldRow { x1: x, x2: 0.0, value })
        .collect();

    let dir = &cfg.output_dir;
    let files = vec![
        write_csv(dir, "fp_evolution.csv", &evolution)?,
        write_csv(dir, "fp_stationary_1d.csv", &stationary)?,
        write_csv(dir, "fp_potential_1d.csv", &potential_rows)?,
        write_csv(dir, "fp_stationary_2d.csv", &fields)?,
        write_csv(dir, "fp_drift_2d.csv", &drifts)?,
        write_json(dir, "fp_solve.json", &summary)?,
    ];
    Ok((summary, files))
}
