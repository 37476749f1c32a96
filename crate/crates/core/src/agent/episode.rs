//! Running one episode of the editing MDP under an ε-greedy policy.

use std::sync::Arc;

use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{argmax, q_values, Agent, AgentError, Candidate, Transition};
use crate::chemprops::{penalized_logp, properties, PropertyReport};
use crate::environment::{
    apply_action, is_terminal, valid_actions, EnvConfig, EnvState, Featurizer, MolAction,
};
use crate::molgraph::{write_smiles, MolecularGraph};
use crate::rewards::{step_reward, RewardConfig, RewardReference};

/// Everything an episode reads but does not own.
pub struct EpisodeEnv<'a> {
    pub env: &'a EnvConfig,
    pub reward: &'a RewardConfig,
    pub featurizer: &'a Featurizer,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StepRecord {
    pub step: usize,
    pub action: MolAction,
    pub smiles: String,
    pub steps_remaining: usize,
    pub reward: f64,
    pub penalized_logp: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BestMolecule {
    pub smiles: String,
    pub reward: f64,
    pub properties: PropertyReport,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpisodeResult {
    pub start_smiles: String,
    pub start_penalized_logp: f64,
    pub steps: Vec<StepRecord>,
    /// Highest-reward molecule reached; the start molecule if no step ran.
    pub best: BestMolecule,
    pub losses: Vec<f64>,
}

impl EpisodeResult {
    pub fn final_smiles(&self) -> &str {
        self.steps.last().map_or(&self.start_smiles, |s| &s.smiles)
    }

    pub fn final_penalized_logp(&self) -> f64 {
        self.steps
            .last()
            .map_or(self.start_penalized_logp, |s| s.penalized_logp)
    }

    /// `(smiles, penalized logP)` for the start and every step.
    pub fn visited(&self) -> impl Iterator<Item = (&str, f64)> {
        std::iter::once((self.start_smiles.as_str(), self.start_penalized_logp)).chain(
            self.steps
                .iter()
                .map(|s| (s.smiles.as_str(), s.penalized_logp)),
        )
    }
}

pub fn random_action_index(n: usize, rng: &mut ChaCha8Rng) -> usize {
    rng.gen_range(0..n)
}

fn candidate(featurizer: &Featurizer, s: &EnvState) -> Result<Candidate, AgentError> {
    Ok(Candidate {
        body: featurizer.molecule_sparse(&s.molecule)?,
        steps_fraction: (s.steps_remaining as f64 / featurizer.max_steps() as f64) as f32,
    })
}

/// Runs from `start` until the horizon. With `agent = None` every action
/// is uniform random. With `learn`, transitions go to the agent's replay
/// buffer and updates follow its training cadence.
///
/// Each step draws one uniform number to decide exploration, then one more
/// for the action index when exploring, so a seeded `rng` reproduces the
/// episode exactly.
pub fn run_episode(
    mut agent: Option<&mut Agent>,
    start: &MolecularGraph,
    envs: &EpisodeEnv<'_>,
    epsilon: f64,
    learn: bool,
    rng: &mut ChaCha8Rng,
) -> Result<EpisodeResult, AgentError> {
    let reference = RewardReference::new(start, &envs.env.features.fingerprint)?;
    let mut state = EnvState::start(start.clone(), envs.env);
    let start_smiles = write_smiles(start);
    let start_penalized_logp = penalized_logp(start)?;
    let mut steps = Vec::new();
    let mut losses = Vec::new();
    let mut pending: Option<Transition> = None;
    let learn = learn && agent.is_some();

    while !is_terminal(&state) {
        let actions = valid_actions(&state, envs.env);
        if actions.is_empty() {
            break;
        }
        let explore = agent.is_none() || rng.gen::<f64>() < epsilon;
        let scored = agent.is_some() && (learn || !explore);

        let (successors, candidates) = if scored {
            let successors = actions
                .iter()
                .map(|&a| apply_action(&state, a))
                .collect::<Result<Vec<_>, _>>()?;
            let candidates = successors
                .iter()
                .map(|s| candidate(envs.featurizer, s))
                .collect::<Result<Vec<_>, _>>()?;
            (Some(successors), Some(Arc::new(candidates)))
        } else {
            (None, None)
        };

        if let (Some(mut p), Some(agent)) = (pending.take(), agent.as_deref_mut()) {
            p.next_candidates = candidates.clone();
            agent.replay.push(p);
        }

        let idx = match (&candidates, explore) {
            (_, true) => random_action_index(actions.len(), rng),
            (Some(c), false) => argmax(&q_values(agent.as_deref().unwrap().online(), c)?),
            (None, false) => unreachable!("greedy steps are always scored"),
        };
        let next = match successors {
            Some(mut s) => s.swap_remove(idx),
            None => apply_action(&state, actions[idx])?,
        };
        let reward = step_reward(&next, &reference, envs.reward)?;
        steps.push(StepRecord {
            step: steps.len() + 1,
            action: actions[idx],
            smiles: write_smiles(&next.molecule),
            steps_remaining: next.steps_remaining,
            reward,
            penalized_logp: penalized_logp(&next.molecule)?,
        });

        if learn {
            let agent = agent.as_deref_mut().unwrap();
            let t = Transition {
                candidates: candidates.expect("learning steps are scored"),
                chosen: idx,
                reward,
                terminal: is_terminal(&next),
                next_candidates: None,
            };
            if t.terminal {
                agent.replay.push(t);
            } else {
                pending = Some(t);
            }
            if let Some(loss) = agent.observe_step(envs.reward.gamma)? {
                losses.push(loss);
            }
        }
        state = next;
    }
    if let (Some(mut p), Some(agent)) = (pending, agent) {
        // dead end before the horizon
        p.terminal = true;
        agent.replay.push(p);
    }

    let best = match steps
        .iter()
        .enumerate()
        .max_by(|a, b| a.1.reward.total_cmp(&b.1.reward).then(b.0.cmp(&a.0)))
    {
        Some((_, s)) => BestMolecule {
            smiles: s.smiles.clone(),
            reward: s.reward,
            properties: properties(
                &crate::molgraph::parse_smiles(&s.smiles).expect("written SMILES reparse"),
            )?,
        },
        None => BestMolecule {
            smiles: start_smiles.clone(),
            reward: crate::rewards::reward(start, &reference, envs.reward)?,
            properties: properties(start)?,
        },
    };
    Ok(EpisodeResult {
        start_smiles,
        start_penalized_logp,
        steps,
        best,
        losses,
    })
}
