//! `optimize`: one greedy episode from a start molecule.

use std::path::{Path, PathBuf};

use graphtrl::agent::{run_episode, EpisodeEnv};
use graphtrl::chemprops::{properties, PropertyReport};
use graphtrl::environment::{
    featurize, state_vector_hash, write_trajectory, EnvState, TrajectoryRecord,
};
use graphtrl::rewards::{reward, RewardReference};
use graphtrl::{parse_smiles, write_smiles, MolecularGraph};
use serde::{Deserialize, Serialize};

use super::{featurizer, load_agent, prepare_out, stream_rng, write_file};
use crate::config::RunConfig;
use crate::error::CliError;
use crate::stats::top_k_unique;

pub const OPTIMIZE_STREAM: u64 = 3;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportedMolecule {
    pub smiles: String,
    /// Undiscounted reward of the molecule against the start.
    pub reward: f64,
    pub properties: PropertyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct OptimizeReport {
    pub start_smiles: String,
    pub start_penalized_logp: f64,
    pub final_smiles: String,
    pub top: Vec<ReportedMolecule>,
    #[serde(skip)]
    pub trajectory: Vec<TrajectoryRecord>,
}

fn data_err(e: impl std::fmt::Display) -> CliError {
    CliError::Data(e.to_string())
}

/// Reward and properties recomputed from a SMILES string alone.
pub fn report_molecule(
    smiles: &str,
    reference: &RewardReference,
    cfg: &RunConfig,
) -> Result<ReportedMolecule, CliError> {
    let g = parse_smiles(smiles).map_err(data_err)?;
    Ok(ReportedMolecule {
        smiles: smiles.to_string(),
        reward: reward(&g, reference, &cfg.reward).map_err(data_err)?,
        properties: properties(&g).map_err(data_err)?,
    })
}

pub fn cmd_optimize(
    cfg: &RunConfig,
    start: &MolecularGraph,
    checkpoint: &Path,
    out_dir: &Path,
) -> Result<(OptimizeReport, PathBuf, PathBuf), CliError> {
    let fz = featurizer(cfg);
    let mut agent = load_agent(checkpoint, &fz)?;
    prepare_out(out_dir)?;
    let envs = EpisodeEnv {
        env: &cfg.env,
        reward: &cfg.reward,
        featurizer: &fz,
    };
    let mut rng = stream_rng(cfg.rng_seed, OPTIMIZE_STREAM);
    let r = run_episode(Some(&mut agent), start, &envs, 0.0, false, &mut rng)?;

    let mut trajectory = Vec::with_capacity(r.steps.len());
    for s in &r.steps {
        let mut state = EnvState::start(parse_smiles(&s.smiles).map_err(data_err)?, &cfg.env);
        state.steps_remaining = s.steps_remaining;
        let v = featurize(&state, &cfg.env).map_err(data_err)?;
        trajectory.push(TrajectoryRecord {
            step: s.step,
            action: s.action,
            smiles: s.smiles.clone(),
            reward: s.reward,
            state_vector_hash: state_vector_hash(&v),
        });
    }

    let reference = RewardReference::new(start, &cfg.env.features.fingerprint).map_err(data_err)?;
    let start_smiles = write_smiles(start);
    let mut scored = Vec::new();
    let visited: Vec<&str> = if r.steps.is_empty() {
        vec![start_smiles.as_str()]
    } else {
        r.steps.iter().map(|s| s.smiles.as_str()).collect()
    };
    for s in &visited {
        scored.push(report_molecule(s, &reference, cfg)?);
    }
    let ranked = top_k_unique(
        scored.iter().map(|m| (m.smiles.as_str(), m.reward)),
        cfg.protocol.top_k,
    );
    let top = ranked
        .into_iter()
        .map(|(s, _)| {
            scored
                .iter()
                .find(|m| m.smiles == s)
                .expect("ranked from scored")
                .clone()
        })
        .collect();

    let report = OptimizeReport {
        start_smiles,
        start_penalized_logp: r.start_penalized_logp,
        final_smiles: r.final_smiles().to_string(),
        top,
        trajectory,
    };
    let traj_path = write_file(&out_dir.join("trajectory.jsonl"), |w| {
        write_trajectory(w, &report.trajectory)
    })?;
    let report_path = write_file(&out_dir.join("report.json"), |w| {
        serde_json::to_writer_pretty(&mut *w, &report)?;
        std::io::Write::write_all(w, b"\n")
    })?;
    Ok((report, traj_path, report_path))
}
