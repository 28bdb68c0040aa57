//! End-to-end acceptance checks at default settings. Prints one PASS/FAIL
//! line per criterion and exits non-zero if any fails.

use std::collections::BTreeMap;
use std::path::Path;
use std::process::ExitCode;
use std::time::{Duration, Instant};

use fpflow::density::DensityEstimate;
use fpflow::fp::{evolve_fp_with, stationary_analytic, EvolveOptions};
use fpflow::grid::Grid1D;
use fpflow::harness::{
    run_complexity, run_experiment, run_fp_solve, run_mode_collapse, run_qubit_ablation, run_scaling, run_training,
    Experiment, ExperimentConfig,
};
use fpflow::metrics::{fit_power_law, kl_divergence};
use fpflow::potential::Potential;
use fpflow::qae::{annealed_qae, classical_mc_partition, grover_step, AmplitudeVector, PartitionProblem, QaeConfig};
use fpflow::seeding::rng_for;

struct Report {
    failures: usize,
}

impl Report {
    fn record(&mut self, id: &str, pass: bool, detail: String) {
        println!("criterion {id}: {} | {detail}", if pass { "PASS" } else { "FAIL" });
        self.failures += !pass as usize;
    }
}

fn elapsed(t: Instant) -> String {
    format!("{:.1}s", t.elapsed().as_secs_f64())
}

fn complexity(cfg: &ExperimentConfig, r: &mut Report) {
    let t = Instant::now();
    let (s, _) = run_complexity(cfg).unwrap();
    let pass = (1.8..=2.2).contains(&s.classical_slope)
        && (0.9..=1.3).contains(&s.quantum_slope)
        && t.elapsed() < Duration::from_secs(300);
    r.record(
        "1 complexity",
        pass,
        format!(
            "classical slope {:.3} in [1.8, 2.2], quantum slope {:.3} in [0.9, 1.3], {} trials, {}",
            s.classical_slope,
            s.quantum_slope,
            s.trials,
            elapsed(t)
        ),
    );
}

fn qae_success(r: &mut Report) {
    let c = fpflow::harness::ComplexityConfig::default();
    let g = Grid1D::new(c.lower, c.upper, c.n_qubits).unwrap();
    let problem = PartitionProblem::new(&c.potential, c.d_coeff, &g).unwrap();
    let m = 6;
    let bound = problem.qae_success_bound(m);
    let trials = 500;
    let within = (0..trials as u64)
        .filter(|&seed| {
            let z = problem.sample_qae(m, &mut rng_for(&[seed])).estimate;
            (z - problem.exact()).abs() <= bound
        })
        .count();
    let rate = within as f64 / trials as f64;
    r.record(
        "2 qae success",
        rate >= 0.81 - 0.03,
        format!("{within}/{trials} = {rate:.3} within the m = {m} bound (need >= 0.78)"),
    );
}

fn stationary(cfg: &ExperimentConfig, r: &mut Report) {
    let t = Instant::now();
    let (s, _) = run_fp_solve(cfg).unwrap();
    let qae = QaeConfig::default();
    let g = qae.grid().unwrap();
    let est = annealed_qae(&Potential::double_well(), &g, &qae).unwrap();
    let mut peaks = est.local_maxima();
    peaks.sort_by(|a, b| est.mass()[*b].total_cmp(&est.mass()[*a]));
    peaks.truncate(2);
    peaks.sort();
    let cells = |target: f64, i: usize| (g.points()[i] - target).abs() / g.spacing();
    let modes_ok = peaks.len() == 2 && cells(-2f64.sqrt(), peaks[0]) <= 3.0 && cells(2f64.sqrt(), peaks[1]) <= 3.0;
    let l1_ok = s.final_l1_to_analytic <= 5e-2;
    let where_modes: Vec<String> = peaks.iter().map(|&i| format!("{:.3}", g.points()[i])).collect();
    r.record(
        "3 stationary fidelity",
        l1_ok && modes_ok,
        format!(
            "solver L1 {:.4} at t = {} (need <= 0.05), estimate modes at [{}] ({} local maxima, need within 3 cells of -/+1.414), {}",
            s.final_l1_to_analytic,
            s.t_final,
            where_modes.join(", "),
            est.local_maxima().len(),
            elapsed(t)
        ),
    );
}

fn ablation(cfg: &ExperimentConfig, r: &mut Report) {
    let (s, _) = run_qubit_ablation(cfg).unwrap();
    let m9 = s.mse_at(9).unwrap();
    let stable = (5..=9).all(|n| s.mse_at(n).unwrap() <= 2.0 * m9 && s.mse_at(n).unwrap() >= m9 / 2.0);
    let coarse = s.mse_at(3).unwrap() > s.mse_at(5).unwrap();
    let table: Vec<String> = (3..=9).map(|n| format!("{n}:{:.5}", s.mse_at(n).unwrap())).collect();
    r.record("4 qubit ablation", stable && coarse, format!("mse {}", table.join(" ")));
}

fn rl(cfg: &ExperimentConfig, r: &mut Report) {
    let t = Instant::now();
    let out = run_training(cfg).unwrap();
    let by = |agent: &str| -> BTreeMap<u64, f64> {
        out.summary.runs.iter().filter(|x| x.agent == agent).map(|x| (x.seed, x.global_rate)).collect()
    };
    let (qff, sac) = (by("qff"), by("sac"));
    let wins = qff.iter().filter(|(seed, q)| **q >= sac[*seed]).count();
    let agg = |agent: &str| out.summary.aggregates.iter().find(|a| a.agent == agent).unwrap().clone();
    let (aq, asac, arand) = (agg("qff"), agg("sac"), agg("random"));
    let a_ok = 2 * wins > qff.len() && aq.global_rate >= asac.global_rate;
    let b_ok = arand.mean_reward < 0.0;
    let c_ok = aq.final_entropy > asac.final_entropy;
    let worst = out
        .runs
        .iter()
        .filter(|run| run.agent == "qff")
        .map(|run| (run.episodes.last().unwrap().sigma.unwrap().powi(2) - cfg.qff.d_coeff).abs())
        .fold(0.0, f64::max);
    let d_ok = worst < 0.05;
    let fast = t.elapsed() < Duration::from_secs(900);
    let seeds = cfg.seeds.len();
    let episodes = cfg.episodes;
    r.record(
        "5a global-optimum rate",
        a_ok && fast,
        format!("qff >= sac in {wins}/{seeds} seeds, pooled {:.4} vs {:.4}", aq.global_rate, asac.global_rate),
    );
    r.record("5b random reward", b_ok, format!("final-80 mean {:.1}", arand.mean_reward));
    r.record(
        "5c entropy ordering",
        c_ok,
        format!("qff {:.3} nats vs sac {:.3} nats", aq.final_entropy, asac.final_entropy),
    );
    r.record(
        "5d sigma^2 -> D",
        d_ok,
        format!("max |sigma^2 - D| = {worst:.2e} at episode {episodes} over {seeds} seeds, training {}", elapsed(t)),
    );
}

fn mode_collapse(cfg: &ExperimentConfig, r: &mut Report) {
    let (s, _) = run_mode_collapse(cfg).unwrap();
    let (q, sac) = (s.agent("qff").unwrap(), s.agent("sac").unwrap());
    let kl_ok = q.final_kl < sac.final_kl;
    let cov_ok = q.coverage.iter().zip(&sac.coverage).all(|(a, b)| a >= b);
    let pairs: Vec<String> = s
        .taus
        .iter()
        .zip(q.coverage.iter().zip(&sac.coverage))
        .map(|(t, (a, b))| format!("{t}:{a:.4}/{b:.4}"))
        .collect();
    r.record(
        "6 mode collapse",
        kl_ok && cov_ok,
        format!("final KL qff {:.3} vs sac {:.3}; coverage qff/sac {}", q.final_kl, sac.final_kl, pairs.join(" ")),
    );
}

fn scaling(cfg: &ExperimentConfig, r: &mut Report) {
    let (work, timing, _) = run_scaling(cfg).unwrap();
    let gap = timing.classical_exponent - timing.quantum_exponent;
    r.record(
        "7 scaling",
        gap >= 0.2,
        format!(
            "timing exponents quantum {:.3} vs classical {:.3} (gap {gap:.3}, need >= 0.2); work exponents {:.3} vs {:.3}",
            timing.quantum_exponent, timing.classical_exponent, work.quantum_work_exponent, work.classical_work_exponent
        ),
    );
}

fn files(dir: &Path) -> BTreeMap<String, Vec<u8>> {
    std::fs::read_dir(dir)
        .unwrap()
        .map(|e| {
            let p = e.unwrap().path();
            (p.file_name().unwrap().to_string_lossy().into_owned(), std::fs::read(&p).unwrap())
        })
        .filter(|(name, _)| !name.starts_with("scaling_timing"))
        .collect()
}

fn determinism(first: &Path, cfg: &ExperimentConfig, r: &mut Report) {
    let t = Instant::now();
    for kind in [
        Experiment::Train,
        Experiment::Complexity,
        Experiment::Scaling,
        Experiment::QubitAblation,
        Experiment::ModeCollapse,
        Experiment::FpSolve,
    ] {
        run_experiment(kind, cfg).unwrap();
    }
    let (a, b) = (files(first), files(&cfg.output_dir));
    let differing: Vec<&String> = a.keys().filter(|k| b.get(*k) != Some(&a[*k])).collect();
    let same_names = a.keys().eq(b.keys());
    r.record(
        "8 determinism",
        same_names && differing.is_empty() && !a.is_empty(),
        format!("{} payload files compared, {} differ {:?}, {}", a.len(), differing.len(), differing, elapsed(t)),
    );
}

fn invariants(r: &mut Report) {
    let mut failed = Vec::new();
    let g = Grid1D::new(-3.0, 3.0, 7).unwrap();

    let mut a = AmplitudeVector::normalized((0..128).map(|i| ((i * 37) % 11) as f64).collect());
    for _ in 0..20 {
        a = grover_step(&a);
    }
    if (a.norm() - 1.0).abs() > 1e-9 || a.values().iter().any(|&v| v < 0.0) {
        failed.push("amplitude normalization");
    }
    let u = AmplitudeVector::uniform(128);
    if grover_step(&u).values().iter().zip(u.values()).any(|(x, y)| (x - y).abs() > 1e-14) {
        failed.push("uniform fixed point");
    }
    let est = annealed_qae(&Potential::double_well(), &g, &QaeConfig::default()).unwrap();
    if (est.mass().iter().sum::<f64>() - 1.0).abs() > 1e-9 {
        failed.push("estimate normalization");
    }

    let rho_star = stationary_analytic(&Potential::double_well(), 0.3, &g).unwrap();
    let opts = EvolveOptions { snapshots: 20, ..EvolveOptions::default() };
    let trace =
        evolve_fp_with(&Potential::double_well(), 0.3, &g, &DensityEstimate::uniform(g.clone()), 5.0, opts).unwrap();
    if trace
        .snapshots
        .iter()
        .any(|s| (s.mass().iter().sum::<f64>() - 1.0).abs() > 1e-6 || s.mass().iter().any(|&m| m < -1e-8))
    {
        failed.push("mass conservation");
    }

    let problem = PartitionProblem::new(&Potential::double_well(), 0.3, &g).unwrap();
    let zs: Vec<f64> =
        (0..400).map(|s| classical_mc_partition(&Potential::double_well(), 0.3, &g, 16, s).unwrap()).collect();
    let mean = zs.iter().sum::<f64>() / zs.len() as f64;
    let se = (zs.iter().map(|z| (z - mean).powi(2)).sum::<f64>() / (zs.len() - 1) as f64 / zs.len() as f64).sqrt();
    if (mean - problem.exact()).abs() > 3.0 * se {
        failed.push("monte carlo unbiasedness");
    }

    if kl_divergence(&rho_star, &rho_star).unwrap().abs() > 1e-12 || kl_divergence(&rho_star, &est).unwrap() < 0.0 {
        failed.push("kl identities");
    }
    let h = fpflow::metrics::policy_entropy(0.0, 1);
    if (h - 0.5 * (2.0 * std::f64::consts::PI * std::f64::consts::E).ln()).abs() > 1e-12 {
        failed.push("gaussian entropy");
    }
    let xs: Vec<f64> = (1..=6).map(f64::from).collect();
    let ys: Vec<f64> = xs.iter().map(|x| 3.0 * x.powf(0.35)).collect();
    if (fit_power_law(&xs, &ys).unwrap() - 0.35).abs() > 1e-9 {
        failed.push("power-law fit");
    }
    r.record(
        "9 invariants",
        failed.is_empty(),
        format!("spot checks failing: {failed:?} (full property suites run in the unit and property tests)"),
    );
}

fn main() -> ExitCode {
    let (dir_a, dir_b) = (tempfile::tempdir().unwrap(), tempfile::tempdir().unwrap());
    let cfg = ExperimentConfig { output_dir: dir_a.path().to_path_buf(), ..ExperimentConfig::default() };
    let mut report = Report { failures: 0 };
    let start = Instant::now();

    complexity(&cfg, &mut report);
    qae_success(&mut report);
    stationary(&cfg, &mut report);
    ablation(&cfg, &mut report);
    rl(&cfg, &mut report);
    mode_collapse(&cfg, &mut report);
    scaling(&cfg, &mut report);
    determinism(dir_a.path(), &ExperimentConfig { output_dir: dir_b.path().to_path_buf(), ..cfg.clone() }, &mut report);
    invariants(&mut report);

    println!("acceptance: {} failing, total {}", report.failures, elapsed(start));
    if report.failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
