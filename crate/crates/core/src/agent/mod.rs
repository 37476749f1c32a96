//! Dueling deep Q-network over successor-state features.
//!
//! Each valid action is represented by the features of the molecule it
//! produces, so the network scores a variable-size candidate set. Both heads
//! run on every candidate; the state value is the mean of the V outputs over
//! the set and advantages are centred over the set, giving
//! Q_j = mean(v) + a_j − mean(a).

mod episode;
mod mlp;
mod replay;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemprops::ChemError;
use crate::environment::{EnvError, FeatureError};
use crate::rewards::RewardError;

pub use episode::{
    random_action_index, run_episode, BestMolecule, EpisodeEnv, EpisodeResult, StepRecord,
};
pub use mlp::{Activations, Adam, Candidate, Mlp};
pub use replay::{ReplayBuffer, Transition};

pub const CHECKPOINT_SCHEMA: &str = "graphtrl-checkpoint/1";

#[derive(Debug, Error)]
pub enum AgentError {
    #[error("shape error: {0}")]
    Shape(String),
    #[error("numerical failure: {0}")]
    Numerical(String),
    #[error("invalid training configuration: {0}")]
    Config(String),
    #[error("checkpoint error: {0}")]
    Checkpoint(String),
    #[error(transparent)]
    Env(#[from] EnvError),
    #[error(transparent)]
    Feature(#[from] FeatureError),
    #[error(transparent)]
    Reward(#[from] RewardError),
    #[error(transparent)]
    Chem(#[from] ChemError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TrainConfig {
    pub learning_rate: f64,
    pub batch_size: usize,
    pub epsilon_start: f64,
    pub epsilon_end: f64,
    /// Episodes over which ε falls linearly from start to end.
    pub epsilon_decay_episodes: usize,
    /// Gradient updates between copies of the online network into the target.
    pub target_sync_period: u64,
    pub episodes: usize,
    pub replay_capacity: usize,
    pub hidden_sizes: Vec<usize>,
    /// Environment steps between gradient updates.
    pub train_frequency: u64,
    /// Feed ln(1 + x) of every (non-negative) feature to the network.
    pub log_inputs: bool,
    pub huber_delta: f64,
    pub feature_cache_capacity: usize,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            learning_rate: 1e-4,
            batch_size: 32,
            epsilon_start: 1.0,
            epsilon_end: 0.1,
            epsilon_decay_episodes: 250,
            target_sync_period: 20,
            episodes: 500,
            replay_capacity: 5000,
            hidden_sizes: vec![512, 128, 32],
            train_frequency: 1,
            log_inputs: true,
            huber_delta: 1.0,
            feature_cache_capacity: 20_000,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), AgentError> {
        let bad = |m: &str| Err(AgentError::Config(m.to_string()));
        if !(self.learning_rate > 0.0) || !self.learning_rate.is_finite() {
            return bad("learning_rate must be positive");
        }
        if self.batch_size == 0 || self.replay_capacity < self.batch_size {
            return bad("batch_size must be positive and no larger than replay_capacity");
        }
        for e in [self.epsilon_start, self.epsilon_end] {
            if !(0.0..=1.0).contains(&e) {
                return bad("epsilon values must lie in [0, 1]");
            }
        }
        if self.target_sync_period == 0 || self.train_frequency == 0 {
            return bad("target_sync_period and train_frequency must be positive");
        }
        if self.hidden_sizes.is_empty() || self.hidden_sizes.contains(&0) {
            return bad("hidden_sizes must be a non-empty list of positive widths");
        }
        if !(self.huber_delta > 0.0) {
            return bad("huber_delta must be positive");
        }
        if self.feature_cache_capacity == 0 {
            return bad("feature_cache_capacity must be positive");
        }
        Ok(())
    }

    pub fn epsilon(&self, episode: usize) -> f64 {
        if self.epsilon_decay_episodes == 0 {
            return self.epsilon_end;
        }
        if episode >= self.epsilon_decay_episodes {
            return self.epsilon_end;
        }
        let frac = episode as f64 / self.epsilon_decay_episodes as f64;
        self.epsilon_start + (self.epsilon_end - self.epsilon_start) * frac
    }
}

fn check_candidates(params: &Mlp, candidates: &[Candidate]) -> Result<(), AgentError> {
    if candidates.is_empty() {
        return Err(AgentError::Shape("empty candidate set".into()));
    }
    if let Some(c) = candidates.iter().find(|c| c.dim() != params.input_dim()) {
        return Err(AgentError::Shape(format!(
            "candidate has {} features, network expects {}",
            c.dim(),
            params.input_dim()
        )));
    }
    Ok(())
}

fn dueling(v: &[f64], a: &[f64]) -> Vec<f64> {
    let k = v.len() as f64;
    let mean_v = v.iter().sum::<f64>() / k;
    let mean_a = a.iter().sum::<f64>() / k;
    a.iter().map(|aj| mean_v + aj - mean_a).collect()
}

pub fn q_values(params: &Mlp, candidates: &[Candidate]) -> Result<Vec<f64>, AgentError> {
    check_candidates(params, candidates)?;
    let (v, a): (Vec<f64>, Vec<f64>) = candidates
        .iter()
        .map(|c| {
            let acts = params.forward(c);
            (acts.value(), acts.advantage())
        })
        .unzip();
    Ok(dueling(&v, &a))
}

/// Index of the largest value, lowest index on ties.
pub fn argmax(values: &[f64]) -> usize {
    let mut best = 0;
    for (j, &q) in values.iter().enumerate().skip(1) {
        if q > values[best] {
            best = j;
        }
    }
    best
}

pub fn td_targets(target: &Mlp, batch: &[&Transition], gamma: f64) -> Result<Vec<f64>, AgentError> {
    batch
        .iter()
        .map(|t| match (&t.next_candidates, t.terminal) {
            (Some(next), false) => {
                let q = q_values(target, next)?;
                Ok(t.reward + gamma * q[argmax(&q)])
            }
            (None, false) => Err(AgentError::Shape(
                "non-terminal transition without successors".into(),
            )),
            (_, true) => Ok(t.reward),
        })
        .collect()
}

fn huber(e: f64, delta: f64) -> (f64, f64) {
    if e.abs() <= delta {
        (0.5 * e * e, e)
    } else {
        (delta * (e.abs() - 0.5 * delta), delta * e.signum())
    }
}

/// Mean Huber loss of Q(chosen) against `targets`, and its gradient with
/// respect to every parameter. The chosen Q depends on every candidate in
/// its set through the two means, so all of them are back-propagated.
pub fn loss_and_grad(
    params: &Mlp,
    batch: &[&Transition],
    targets: &[f64],
    huber_delta: f64,
) -> Result<(f64, Vec<f64>), AgentError> {
    let mut grad = vec![0.0; params.params().len()];
    let mut loss = 0.0;
    let b = batch.len() as f64;
    for (t, &y) in batch.iter().zip(targets) {
        check_candidates(params, &t.candidates)?;
        let acts: Vec<Activations> = t.candidates.iter().map(|c| params.forward(c)).collect();
        let v: Vec<f64> = acts.iter().map(Activations::value).collect();
        let a: Vec<f64> = acts.iter().map(Activations::advantage).collect();
        let q = dueling(&v, &a)[t.chosen];
        let (l, dl) = huber(q - y, huber_delta);
        loss += l / b;
        let g = dl / b;
        let k = t.candidates.len() as f64;
        for (j, (c, act)) in t.candidates.iter().zip(&acts).enumerate() {
            let da = if j == t.chosen {
                g * (1.0 - 1.0 / k)
            } else {
                -g / k
            };
            params.backward(c, act, g / k, da, &mut grad);
        }
    }
    Ok((loss, grad))
}

pub struct Agent {
    cfg: TrainConfig,
    online: Mlp,
    target: Mlp,
    adam: Adam,
    updates: u64,
    env_steps: u64,
    rng: ChaCha8Rng,
    pub replay: ReplayBuffer,
}

impl Agent {
    pub fn new(cfg: TrainConfig, input_dim: usize, seed: u64) -> Result<Self, AgentError> {
        cfg.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let online = Mlp::new(input_dim, &cfg.hidden_sizes, cfg.log_inputs, &mut rng);
        let adam = Adam::new(online.params().len());
        Ok(Agent {
            target: online.clone(),
            online,
            adam,
            updates: 0,
            env_steps: 0,
            rng,
            replay: ReplayBuffer::new(cfg.replay_capacity),
            cfg,
        })
    }

    pub fn config(&self) -> &TrainConfig {
        &self.cfg
    }

    pub fn online(&self) -> &Mlp {
        &self.online
    }

    pub fn target(&self) -> &Mlp {
        &self.target
    }

    pub fn updates(&self) -> u64 {
        self.updates
    }

    pub fn env_steps(&self) -> u64 {
        self.env_steps
    }

    /// Counts one environment step and trains when the cadence says so.
    pub fn observe_step(&mut self, gamma: f64) -> Result<Option<f64>, AgentError> {
        self.env_steps += 1;
        if self.env_steps.is_multiple_of(self.cfg.train_frequency) {
            self.train_step(gamma)
        } else {
            Ok(None)
        }
    }

    /// One gradient update from a replay batch; `None` while the buffer is
    /// smaller than a batch.
    pub fn train_step(&mut self, gamma: f64) -> Result<Option<f64>, AgentError> {
        let Some(batch) = self.replay.sample(self.cfg.batch_size, &mut self.rng) else {
            return Ok(None);
        };
        let targets = td_targets(&self.target, &batch, gamma)?;
        let (loss, grad) = loss_and_grad(&self.online, &batch, &targets, self.cfg.huber_delta)?;
        if !loss.is_finite() {
            return Err(AgentError::Numerical(format!(
                "loss became {loss} at update {}",
                self.updates
            )));
        }
        self.adam
            .step(self.online.params_mut(), &grad, self.cfg.learning_rate);
        self.updates += 1;
        if self.updates.is_multiple_of(self.cfg.target_sync_period) {
            if !self.online.all_finite() {
                return Err(AgentError::Numerical(format!(
                    "non-finite weight after update {}",
                    self.updates
                )));
            }
            self.target = self.online.clone();
        }
        Ok(Some(loss))
    }

    pub fn checkpoint(&self, config_echo: serde_json::Value) -> Checkpoint {
        Checkpoint {
            schema: CHECKPOINT_SCHEMA.to_string(),
            config: config_echo,
            train: self.cfg.clone(),
            layer_sizes: self.online.sizes().to_vec(),
            log_inputs: self.online.log_inputs(),
            layers: LayerWeights::split(&self.online),
            target_layers: LayerWeights::split(&self.target),
            adam: self.adam.clone(),
            updates: self.updates,
            env_steps: self.env_steps,
            rng: self.rng.clone(),
        }
    }

    pub fn from_checkpoint(ck: Checkpoint) -> Result<Self, AgentError> {
        if ck.schema != CHECKPOINT_SCHEMA {
            return Err(AgentError::Checkpoint(format!(
                "schema '{}' is not '{CHECKPOINT_SCHEMA}'",
                ck.schema
            )));
        }
        ck.train.validate()?;
        let online = LayerWeights::join(&ck.layer_sizes, ck.log_inputs, &ck.layers)?;
        let target = LayerWeights::join(&ck.layer_sizes, ck.log_inputs, &ck.target_layers)?;
        if ck.adam.m.len() != online.params().len() || ck.adam.v.len() != online.params().len() {
            return Err(AgentError::Checkpoint(
                "optimizer state does not match the network".into(),
            ));
        }
        Ok(Agent {
            replay: ReplayBuffer::new(ck.train.replay_capacity),
            cfg: ck.train,
            online,
            target,
            adam: ck.adam,
            updates: ck.updates,
            env_steps: ck.env_steps,
            rng: ck.rng,
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LayerWeights {
    /// `weights[i][o]` connects input unit i to output unit o.
    pub weights: Vec<Vec<f64>>,
    pub bias: Vec<f64>,
}

impl LayerWeights {
    fn split(mlp: &Mlp) -> Vec<LayerWeights> {
        let sizes = mlp.sizes();
        (0..sizes.len() - 1)
            .map(|l| {
                let (w, b) = mlp.layer_ranges(l);
                LayerWeights {
                    weights: mlp.params()[w]
                        .chunks(sizes[l + 1])
                        .map(<[f64]>::to_vec)
                        .collect(),
                    bias: mlp.params()[b].to_vec(),
                }
            })
            .collect()
    }

    fn join(sizes: &[usize], log_inputs: bool, layers: &[LayerWeights]) -> Result<Mlp, AgentError> {
        if sizes.len() < 2 || *sizes.last().unwrap() != 2 || layers.len() != sizes.len() - 1 {
            return Err(AgentError::Checkpoint(
                "layer sizes do not describe a dueling network".into(),
            ));
        }
        let mut mlp = Mlp::zeros(sizes.to_vec(), log_inputs);
        for (l, layer) in layers.iter().enumerate() {
            let (w, b) = mlp.layer_ranges(l);
            let shape_ok = layer.weights.len() == sizes[l]
                && layer.weights.iter().all(|row| row.len() == sizes[l + 1])
                && layer.bias.len() == sizes[l + 1];
            if !shape_ok {
                return Err(AgentError::Checkpoint(format!(
                    "layer {l} has the wrong shape"
                )));
            }
            let flat: Vec<f64> = layer.weights.iter().flatten().copied().collect();
            mlp.params_mut()[w].copy_from_slice(&flat);
            mlp.params_mut()[b].copy_from_slice(&layer.bias);
        }
        if !mlp.all_finite() {
            return Err(AgentError::Checkpoint("non-finite weights".into()));
        }
        Ok(mlp)
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Checkpoint {
    pub schema: String,
    pub config: serde_json::Value,
    pub train: TrainConfig,
    pub layer_sizes: Vec<usize>,
    pub log_inputs: bool,
    pub layers: Vec<LayerWeights>,
    pub target_layers: Vec<LayerWeights>,
    pub adam: Adam,
    pub updates: u64,
    pub env_steps: u64,
    pub rng: ChaCha8Rng,
}
