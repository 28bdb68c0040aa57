use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use serde_json::json;

use fpflow::agents::AgentKind;
use fpflow::harness::{run_experiment, Experiment, ExperimentConfig};
use fpflow::{Error, Result};

#[derive(Parser, Debug)]
#[command(name = "fpflow", version, about = "Fokker-Planck density estimation and exploration-bonus RL experiments")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// TOML config; unspecified fields take their defaults.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Comma-separated seeds, overriding the config.
    #[arg(long, global = true, value_delimiter = ',')]
    seed: Option<Vec<u64>>,

    /// Output directory, overriding the config.
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    /// Comma-separated agents (qff, sac, ddpg, random), overriding the config.
    #[arg(long, global = true, value_delimiter = ',')]
    agent: Option<Vec<String>>,

    /// Episode count override for training runs.
    #[arg(long, global = true)]
    episodes: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Train agents on the multimodal control task.
    Train,
    /// Queries-to-precision sweep for the partition function.
    Complexity,
    /// Cost growth with state dimension.
    Scaling,
    /// Estimator error against qubit count.
    AblateQubits,
    /// Visitation KL and coverage on the 1D double-well task.
    ModeCollapse,
    /// Fokker-Planck time evolution and 2D stationary fields.
    FpSolve,
}

impl Command {
    fn experiment(self) -> Experiment {
        match self {
            Command::Train => Experiment::Train,
            Command::Complexity => Experiment::Complexity,
            Command::Scaling => Experiment::Scaling,
            Command::AblateQubits => Experiment::QubitAblation,
            Command::ModeCollapse => Experiment::ModeCollapse,
            Command::FpSolve => Experiment::FpSolve,
        }
    }
}

fn build_config(cli: &Cli) -> Result<ExperimentConfig> {
    let mut cfg = match &cli.config {
        Some(path) => ExperimentConfig::load(path)?,
        None => ExperimentConfig::default(),
    };
    if let Some(seeds) = &cli.seed {
        cfg.seeds = seeds.clone();
    }
    if let Some(out) = &cli.out {
        cfg.output_dir = out.clone();
    }
    if let Some(agents) = &cli.agent {
        let kinds = agents.iter().map(|a| a.parse::<AgentKind>()).collect::<Result<Vec<_>>>()?;
        cfg.agents = kinds.clone();
        cfg.mode_collapse.agents = kinds;
    }
    if let Some(episodes) = cli.episodes {
        cfg.episodes = episodes;
        cfg.mode_collapse.episodes = episodes;
    }
    cfg.validate()?;
    Ok(cfg)
}

fn fail(kind: &str, message: &str) -> ExitCode {
    eprintln!("{}", json!({ "error": kind, "message": message }));
    ExitCode::FAILURE
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) if matches!(e.kind(), clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion) => {
            print!("{e}");
            return ExitCode::SUCCESS;
        }
        Err(e) => return fail("usage", e.to_string().trim()),
    };
    let experiment = cli.command.experiment();
    let result = build_config(&cli).and_then(|cfg| run_experiment(experiment, &cfg));
    match result {
        Ok(files) => {
            let files: Vec<String> = files.iter().map(|p| p.display().to_string()).collect();
            println!("{}", json!({ "experiment": experiment.name(), "files": files }));
            ExitCode::SUCCESS
        }
        Err(e) => fail(e.kind(), &Error::to_string(&e)),
    }
}
