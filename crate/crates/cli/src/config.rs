//! The run configuration: one JSON document covering every module.

use std::path::{Path, PathBuf};

use graphtrl::agent::TrainConfig;
use graphtrl::environment::EnvConfig;
use graphtrl::rewards::RewardConfig;
use serde::{Deserialize, Serialize};

use crate::error::CliError;

/// Which molecules training episodes start from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TrainStart {
    /// Every episode starts from the training molecule with the lowest
    /// penalized logP.
    Lowest,
    /// Episodes cycle through the training molecules in file order.
    Cycle,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ProtocolConfig {
    /// Draw this many molecules (seeded) from the input for training; all of
    /// them when absent.
    pub train_sample: Option<usize>,
    pub train_start: TrainStart,
    /// Exploration rate of the ε-greedy evaluation policy.
    pub eval_epsilon: f64,
    /// Length of the best-molecule lists in reports.
    pub top_k: usize,
}

impl Default for ProtocolConfig {
    fn default() -> Self {
        ProtocolConfig {
            train_sample: None,
            train_start: TrainStart::Lowest,
            eval_epsilon: 0.1,
            top_k: 3,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct PathsConfig {
    /// SMILES file; the bundled sample when absent.
    pub input: Option<PathBuf>,
    pub out: Option<PathBuf>,
    pub checkpoint: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
#[derive(Default)]
pub struct RunConfig {
    pub env: EnvConfig,
    pub reward: RewardConfig,
    pub train: TrainConfig,
    pub protocol: ProtocolConfig,
    pub paths: PathsConfig,
    pub rng_seed: u64,
}

impl RunConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        let cfg: RunConfig =
            serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        Self::from_json(&text).map_err(|e| match e {
            CliError::Config(m) => CliError::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("configuration serializes")
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let config = |e: &dyn std::fmt::Display| CliError::Config(e.to_string());
        self.env.validate().map_err(|e| config(&e))?;
        self.reward.validate().map_err(|e| config(&e))?;
        self.train.validate().map_err(|e| config(&e))?;
        let p = &self.protocol;
        if !(0.0..=1.0).contains(&p.eval_epsilon) {
            return Err(CliError::Config(format!(
                "eval_epsilon must lie in [0, 1], got {}",
                p.eval_epsilon
            )));
        }
        if p.top_k == 0 {
            return Err(CliError::Config("top_k must be at least 1".into()));
        }
        if p.train_sample == Some(0) {
            return Err(CliError::Config("train_sample must be at least 1".into()));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip_is_identity() {
        let mut cfg = RunConfig {
            rng_seed: 42,
            ..RunConfig::default()
        };
        cfg.protocol.train_sample = Some(7);
        cfg.env.max_steps = 5;
        let back = RunConfig::from_json(&cfg.to_json()).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_are_rejected() {
        for text in [
            r#"{"rng_seed": 1, "typo": 2}"#,
            r#"{"env": {"max_step": 3}}"#,
            r#"{"train": {"learning_rat": 0.1}}"#,
            r#"{"env": {"features": {"mwcg": {"kapa": 2}}}}"#,
        ] {
            assert!(
                matches!(RunConfig::from_json(text), Err(CliError::Config(_))),
                "{text}"
            );
        }
    }

    #[test]
    fn partial_documents_fill_defaults() {
        let cfg = RunConfig::from_json(r#"{"env": {"max_steps": 4}}"#).unwrap();
        assert_eq!(cfg.env.max_steps, 4);
        assert_eq!(cfg.train, TrainConfig::default());
    }

    #[test]
    fn invalid_values_are_config_errors() {
        for text in [
            r#"{"env": {"max_steps": 0}}"#,
            r#"{"reward": {"delta": 2.0}}"#,
            r#"{"protocol": {"top_k": 0}}"#,
            r#"{"train": {"batch_size": 0}}"#,
        ] {
            let err = RunConfig::from_json(text).unwrap_err();
            assert_eq!(err.exit_code(), 1, "{text}");
        }
    }
}
