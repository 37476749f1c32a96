//! `train`: fit the Q-network on episodes from the training molecules.

use std::io::Write;
use std::path::{Path, PathBuf};

use graphtrl::agent::{run_episode, Agent, EpisodeEnv};
use graphtrl::chemprops::penalized_logp;
use graphtrl::MolecularGraph;
use rand::seq::index;
use serde::{Deserialize, Serialize};

use super::{featurizer, prepare_out, stream_rng, write_file};
use crate::config::{RunConfig, TrainStart};
use crate::dataset::{self, Entry};
use crate::error::CliError;
use crate::stats::mean;

pub const EPISODE_STREAM: u64 = 1;
pub const SAMPLE_STREAM: u64 = 2;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeLog {
    pub episode: usize,
    pub start_smiles: String,
    pub epsilon: f64,
    pub steps: usize,
    pub final_smiles: String,
    pub final_reward: f64,
    pub final_penalized_logp: f64,
    pub best_smiles: String,
    pub best_reward: f64,
    pub best_penalized_logp: f64,
    pub mean_loss: Option<f64>,
    pub updates: u64,
}

#[derive(Debug, Clone)]
pub struct TrainSummary {
    pub episodes: Vec<EpisodeLog>,
    pub training_smiles: Vec<String>,
    pub checkpoint_path: PathBuf,
    pub log_path: PathBuf,
}

/// The training molecules: a seeded draw of `train_sample` entries in file
/// order, or all of them.
fn training_set(cfg: &RunConfig, entries: Vec<Entry>) -> Vec<Entry> {
    match cfg.protocol.train_sample {
        Some(n) if n < entries.len() => {
            let mut rng = stream_rng(cfg.rng_seed, SAMPLE_STREAM);
            let mut picked = index::sample(&mut rng, entries.len(), n).into_vec();
            picked.sort_unstable();
            picked.into_iter().map(|i| entries[i].clone()).collect()
        }
        _ => entries,
    }
}

fn lowest_penalized(entries: &[Entry]) -> Result<usize, CliError> {
    let mut best: Option<(usize, f64)> = None;
    for (i, e) in entries.iter().enumerate() {
        let p = penalized_logp(&e.molecule)
            .map_err(|err| CliError::Data(format!("{}: {err}", e.smiles)))?;
        if best.is_none_or(|(_, b)| p < b) {
            best = Some((i, p));
        }
    }
    Ok(best.expect("training set is non-empty").0)
}

pub fn cmd_train(
    cfg: &RunConfig,
    input: Option<&Path>,
    out_dir: &Path,
) -> Result<TrainSummary, CliError> {
    let data = dataset::load(input)?;
    prepare_out(out_dir)?;
    let train_set = training_set(cfg, data.entries);
    let starts: Vec<&MolecularGraph> = match cfg.protocol.train_start {
        TrainStart::Lowest => vec![&train_set[lowest_penalized(&train_set)?].molecule],
        TrainStart::Cycle => train_set.iter().map(|e| &e.molecule).collect(),
    };
    let fz = featurizer(cfg);
    let envs = EpisodeEnv {
        env: &cfg.env,
        reward: &cfg.reward,
        featurizer: &fz,
    };
    let mut agent = Agent::new(cfg.train.clone(), fz.state_len(), cfg.rng_seed)?;
    let mut rng = stream_rng(cfg.rng_seed, EPISODE_STREAM);
    let mut logs = Vec::with_capacity(cfg.train.episodes);
    for ep in 0..cfg.train.episodes {
        let epsilon = cfg.train.epsilon(ep);
        let start = starts[ep % starts.len()];
        let r = run_episode(Some(&mut agent), start, &envs, epsilon, true, &mut rng)?;
        let last = r.steps.last();
        logs.push(EpisodeLog {
            episode: ep,
            start_smiles: r.start_smiles.clone(),
            epsilon,
            steps: r.steps.len(),
            final_smiles: r.final_smiles().to_string(),
            final_reward: last.map_or(0.0, |s| s.reward),
            final_penalized_logp: r.final_penalized_logp(),
            best_smiles: r.best.smiles.clone(),
            best_reward: r.best.reward,
            best_penalized_logp: r.best.properties.penalized_logp,
            mean_loss: (!r.losses.is_empty()).then(|| mean(&r.losses)),
            updates: agent.updates(),
        });
        if (ep + 1) % 25 == 0 || ep + 1 == cfg.train.episodes {
            let recent = &logs[logs.len().saturating_sub(25)..];
            let best: Vec<f64> = recent.iter().map(|l| l.best_penalized_logp).collect();
            log::info!(
                "episode {}/{}: epsilon {:.3}, mean best penalized logP {:.3}, updates {}, cached states {}",
                ep + 1,
                cfg.train.episodes,
                epsilon,
                mean(&best),
                agent.updates(),
                fz.cached()
            );
        }
    }
    let echo = serde_json::to_value(cfg).expect("configuration serializes");
    let checkpoint = agent.checkpoint(echo);
    let checkpoint_path = write_file(&out_dir.join("checkpoint.json"), |w| {
        serde_json::to_writer(&mut *w, &checkpoint)?;
        writeln!(w)
    })?;
    let log_path = write_file(&out_dir.join("train_log.jsonl"), |w| {
        logs.iter().try_for_each(|l| {
            serde_json::to_writer(&mut *w, l)?;
            writeln!(w)
        })
    })?;
    Ok(TrainSummary {
        episodes: logs,
        training_smiles: train_set.iter().map(|e| e.smiles.clone()).collect(),
        checkpoint_path,
        log_path,
    })
}
