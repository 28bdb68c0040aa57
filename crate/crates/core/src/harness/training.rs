use std::path::PathBuf;

use serde::Serialize;

use super::config::ExperimentConfig;
use super::output::{write_csv, write_json, write_table};
use crate::agents::{Agent, AgentKind, DdpgAgent, QffAgent, RandomAgent, SacAgent};
use crate::env::{is_global_optimum, reset_with, step, EnvConfig};
use crate::error::{Error, Result};
use crate::metrics::{table1_summary, EpisodeRecord, RunArtifacts, Table1Summary};
use crate::seeding::{label, rng_for};

pub fn build_agent(kind: AgentKind, env: &EnvConfig, cfg: &ExperimentConfig) -> Result<Agent> {
    let (d, m) = (env.state_dim, env.action_dim);
    Ok(match kind {
        AgentKind::Qff => Agent::Qff(QffAgent::new(d, m, cfg.qff.clone(), &cfg.qae, env.fp_potential())?),
        AgentKind::Sac => Agent::Sac(SacAgent::new(d, m, cfg.sac.clone())?),
        AgentKind::Ddpg => Agent::Ddpg(DdpgAgent::new(d, m, cfg.ddpg.clone())?),
        AgentKind::Random => Agent::Random(RandomAgent { action_dim: m }),
    })
}

/// One environment step as recorded in a trace file.
#[derive(Debug, Clone, PartialEq)]
pub struct StepRecord {
    pub episode: usize,
    pub t: usize,
    pub state: Vec<f64>,
    pub action: Vec<f64>,
    pub reward: f64,
    pub bonus: f64,
    pub done: bool,
}

pub struct TrainedRun {
    pub artifacts: RunArtifacts,
    pub agent: Agent,
}

/// Runs `episodes` episodes of act → step → learn. `on_step` sees every
/// transition after the agent has learned from it.
///
/// The environment stream depends only on `seed`, so agents trained with the
/// same seed face the same reset states and dynamics noise.
pub fn train_agent(
    kind: AgentKind,
    seed: u64,
    env: &EnvConfig,
    cfg: &ExperimentConfig,
    episodes: usize,
    mut on_step: impl FnMut(&StepRecord),
) -> Result<TrainedRun> {
    env.validate()?;
    let mut agent = build_agent(kind, env, cfg)?;
    let mut env_rng = rng_for(&[seed, label("env")]);
    let mut agent_rng = rng_for(&[seed, label(kind.name())]);
    let mut records = Vec::with_capacity(episodes);

    for episode in 0..episodes {
        agent.begin_episode();
        let mut state = reset_with(env, &mut env_rng);
        let (mut reward_sum, mut bonus_sum, mut entropy_sum, mut hits) = (0.0, 0.0, 0.0, 0usize);
        let mut steps = 0usize;
        loop {
            let action = agent.act(&state.s, &mut agent_rng);
            let out = step(&state, &action, env, &mut env_rng).map_err(|e| e.context(format!("episode {episode}")))?;
            let report = agent
                .observe(&state.s, &action, out.reward, &out.state.s, out.done)
                .map_err(|e| e.context(format!("{} seed {seed} episode {episode}", kind.name())))?;
            reward_sum += out.reward;
            bonus_sum += report.bonus;
            entropy_sum += agent.entropy();
            hits += is_global_optimum(&out.state) as usize;
            steps += 1;
            on_step(&StepRecord {
                episode,
                t: state.step_index,
                state: out.state.s.clone(),
                action: out.action.clone(),
                reward: out.reward,
                bonus: report.bonus,
                done: out.done,
            });
            let done = out.done;
            state = out.state;
            if done {
                break;
            }
        }
        records.push(EpisodeRecord {
            episode,
            env_reward: reward_sum,
            bonus: bonus_sum,
            entropy: entropy_sum / steps as f64,
            discovery_fraction: hits as f64 / steps as f64,
            sigma: agent.sigma(),
        });
    }
    Ok(TrainedRun {
        artifacts: RunArtifacts { agent: kind.name().into(), seed, horizon: env.horizon, episodes: records },
        agent,
    })
}

/// Per-agent aggregate over seeds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AgentAggregate {
    pub agent: String,
    pub seeds: usize,
    pub mean_reward: f64,
    pub std_of_seed_means: f64,
    pub global_rate: f64,
    pub final_entropy: f64,
    pub final_sigma: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TrainingSummary {
    pub episodes: usize,
    pub seeds: Vec<u64>,
    pub runs: Vec<Table1Summary>,
    pub aggregates: Vec<AgentAggregate>,
}

pub struct TrainingOutput {
    pub runs: Vec<RunArtifacts>,
    pub summary: TrainingSummary,
    pub files: Vec<PathBuf>,
}

fn trace_header(env: &EnvConfig) -> Vec<String> {
    let mut h = vec!["episode".to_string(), "t".to_string()];
    h.extend((1..=env.state_dim).map(|i| format!("s{i}")));
    h.extend((1..=env.action_dim).map(|j| format!("a{j}")));
    h.extend(["reward", "bonus", "done"].map(String::from));
    h
}

fn trace_row(s: &StepRecord) -> Vec<String> {
    let mut row = vec![s.episode.to_string(), s.t.to_string()];
    row.extend(s.state.iter().chain(&s.action).map(|v| v.to_string()));
    row.extend([s.reward.to_string(), s.bonus.to_string(), s.done.to_string()]);
    row
}

fn summarize(runs: &[RunArtifacts]) -> Vec<Table1Summary> {
    runs.iter().filter_map(|r| table1_summary(r).ok()).collect()
}

fn aggregate(kind: AgentKind, runs: &[RunArtifacts]) -> Option<AgentAggregate> {
    let mine: Vec<&RunArtifacts> = runs.iter().filter(|r| r.agent == kind.name()).collect();
    if mine.is_empty() {
        return None;
    }
    let n = mine.len() as f64;
    let window = |r: &RunArtifacts| r.episodes.len().min(crate::metrics::FINAL_WINDOW);
    let tail_mean = |r: &RunArtifacts, f: fn(&EpisodeRecord) -> f64| {
        let w = window(r);
        r.episodes[r.episodes.len() - w..].iter().map(f).sum::<f64>() / w as f64
    };
    let means: Vec<f64> = mine.iter().map(|r| tail_mean(r, |e| e.env_reward)).collect();
    let mean_reward = means.iter().sum::<f64>() / n;
    let std = (means.iter().map(|m| (m - mean_reward).powi(2)).sum::<f64>() / n).sqrt();
    let sigmas: Vec<f64> = mine.iter().filter_map(|r| r.episodes.last().and_then(|e| e.sigma)).collect();
    Some(AgentAggregate {
        agent: kind.name().into(),
        seeds: mine.len(),
        mean_reward,
        std_of_seed_means: std,
        global_rate: mine.iter().map(|r| tail_mean(r, |e| e.discovery_fraction)).sum::<f64>() / n,
        final_entropy: mine.iter().map(|r| r.episodes.last().map_or(0.0, |e| e.entropy)).sum::<f64>() / n,
        final_sigma: (!sigmas.is_empty()).then(|| sigmas.iter().sum::<f64>() / sigmas.len() as f64),
    })
}

/// Trains every configured (agent, seed) pair and writes per-run CSVs,
/// `table1.csv` and `train_summary.json` under the output directory.
pub fn run_training(cfg: &ExperimentConfig) -> Result<TrainingOutput> {
    cfg.validate()?;
    let dir = &cfg.output_dir;
    let mut agents = cfg.agents.clone();
    agents.sort();
    agents.dedup();
    let mut seeds = cfg.seeds.clone();
    seeds.sort();
    seeds.dedup();

    let mut runs = Vec::new();
    let mut files = Vec::new();
    for &kind in &agents {
        for &seed in &seeds {
            let mut trace = Vec::new();
            let run = train_agent(kind, seed, &cfg.env, cfg, cfg.episodes, |s| {
                if cfg.record_traces {
                    trace.push(trace_row(s));
                }
            })?;
            files.push(write_csv(dir, &format!("train_{}_seed{seed}.csv", kind.name()), &run.artifacts.episodes)?);
            if cfg.record_traces {
                let name = format!("trace_{}_seed{seed}.csv", kind.name());
                files.push(write_table(dir, &name, &trace_header(&cfg.env), &trace)?);
            }
            runs.push(run.artifacts);
        }
    }
    let table = summarize(&runs);
    if !table.is_empty() {
        files.push(write_csv(dir, "table1.csv", &table)?);
    }
    let summary = TrainingSummary {
        episodes: cfg.episodes,
        seeds,
        runs: table,
        aggregates: agents.iter().filter_map(|&k| aggregate(k, &runs)).collect(),
    };
    files.push(write_json(dir, "train_summary.json", &summary)?);
    if runs.iter().any(|r| r.episodes.iter().any(|e| !e.env_reward.is_finite())) {
        return Err(Error::Parameter("non-finite episode reward".into()));
    }
    Ok(TrainingOutput { runs, summary, files })
}
