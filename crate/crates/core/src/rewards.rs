//! Reward functions: penalized logP under similarity and ring-count
//! constraints, and a target reward mixing closeness to a Betti number or
//! molecular weight with similarity to the starting molecule.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::chemprops::{mol_weight, penalized_logp, ChemError};
use crate::environment::EnvState;
use crate::fingerprint::{
    morgan_fingerprint, tanimoto, Fingerprint, FingerprintConfig, FingerprintError,
};
use crate::metric::geodesic_distances;
use crate::molgraph::MolecularGraph;
use crate::topology::{betti_at, rips_persistence, BETTI_SCALE_FACTOR};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RewardError {
    #[error("invalid reward configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Chem(#[from] ChemError),
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum RewardMode {
    Constrained,
    Target,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RewardConfig {
    pub mode: RewardMode,
    pub lambda: f64,
    /// Similarity threshold.
    pub delta: f64,
    /// Betti-agreement threshold.
    pub epsilon: f64,
    /// Weight of similarity in the target reward.
    pub w: f64,
    pub target_betti: Option<usize>,
    pub target_weight: Option<f64>,
    pub gamma: f64,
}

impl Default for RewardConfig {
    fn default() -> Self {
        RewardConfig {
            mode: RewardMode::Constrained,
            lambda: 1.0,
            delta: 0.4,
            epsilon: 0.5,
            w: 0.5,
            target_betti: None,
            target_weight: None,
            gamma: 0.9,
        }
    }
}

impl RewardConfig {
    pub fn validate(&self) -> Result<(), RewardError> {
        let bad = |m: String| Err(RewardError::Config(m));
        if !(self.lambda >= 0.0) || !self.lambda.is_finite() {
            return bad(format!("lambda must be ≥ 0, got {}", self.lambda));
        }
        for (name, v) in [
            ("delta", self.delta),
            ("epsilon", self.epsilon),
            ("w", self.w),
        ] {
            if !(0.0..=1.0).contains(&v) {
                return bad(format!("{name} must lie in [0, 1], got {v}"));
            }
        }
        if !(self.gamma > 0.0 && self.gamma <= 1.0) {
            return bad(format!("gamma must lie in (0, 1], got {}", self.gamma));
        }
        if let Some(t) = self.target_weight {
            if !(t > 0.0) || !t.is_finite() {
                return bad(format!("target_weight must be positive, got {t}"));
            }
        }
        if self.mode == RewardMode::Target {
            self.target()?;
        }
        Ok(())
    }

    fn target(&self) -> Result<Target, RewardError> {
        match (self.target_betti, self.target_weight) {
            (Some(b), None) => Ok(Target::Betti(b)),
            (None, Some(w)) => Ok(Target::Weight(w)),
            (None, None) => Err(RewardError::Config(
                "target reward needs target_betti or target_weight".into(),
            )),
            (Some(_), Some(_)) => Err(RewardError::Config(
                "set only one of target_betti and target_weight".into(),
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
enum Target {
    Betti(usize),
    Weight(f64),
}

/// β₁ read just above the bond scale. The geodesic metric is a multiple of
/// hop counts, so the result does not depend on the bond length.
pub fn betti1(g: &MolecularGraph) -> usize {
    let dm = geodesic_distances(g, 1.0).expect("molecular graphs are connected");
    let diagram = rips_persistence(&dm, 1, BETTI_SCALE_FACTOR);
    betti_at(&diagram, BETTI_SCALE_FACTOR).1
}

/// 1 − min(1, |observed − target| / max(1, target)).
pub fn closeness(observed: f64, target: f64) -> f64 {
    1.0 - ((observed - target).abs() / target.max(1.0)).min(1.0)
}

pub fn betti_agreement(m: &MolecularGraph, m0: &MolecularGraph) -> f64 {
    closeness(betti1(m) as f64, betti1(m0) as f64)
}

/// Penalized logP minus λ times how far S and B fall below their thresholds.
pub fn constrained_value(plogp: f64, similarity: f64, agreement: f64, cfg: &RewardConfig) -> f64 {
    let mut penalty = 0.0;
    if similarity < cfg.delta {
        penalty += cfg.delta - similarity;
    }
    if agreement < cfg.epsilon {
        penalty += cfg.epsilon - agreement;
    }
    if penalty == 0.0 {
        plogp
    } else {
        plogp - cfg.lambda * penalty
    }
}

pub fn target_value(closeness_to_target: f64, similarity: f64, cfg: &RewardConfig) -> f64 {
    (1.0 - cfg.w) * closeness_to_target + cfg.w * similarity
}

/// Starting-molecule quantities every reward compares against.
#[derive(Debug, Clone)]
pub struct RewardReference {
    pub fingerprint: Fingerprint,
    pub betti1: usize,
    fp_cfg: FingerprintConfig,
}

impl RewardReference {
    pub fn new(m0: &MolecularGraph, fp_cfg: &FingerprintConfig) -> Result<Self, RewardError> {
        Ok(RewardReference {
            fingerprint: morgan_fingerprint(m0, fp_cfg)?,
            betti1: betti1(m0),
            fp_cfg: *fp_cfg,
        })
    }

    pub fn similarity(&self, m: &MolecularGraph) -> Result<f64, RewardError> {
        Ok(tanimoto(
            &morgan_fingerprint(m, &self.fp_cfg)?,
            &self.fingerprint,
        )?)
    }
}

pub fn reward_constrained(
    m: &MolecularGraph,
    reference: &RewardReference,
    cfg: &RewardConfig,
) -> Result<f64, RewardError> {
    let plogp = penalized_logp(m)?;
    if cfg.lambda == 0.0 {
        return Ok(plogp);
    }
    let s = reference.similarity(m)?;
    let b = closeness(betti1(m) as f64, reference.betti1 as f64);
    Ok(constrained_value(plogp, s, b, cfg))
}

pub fn reward_target(
    m: &MolecularGraph,
    reference: &RewardReference,
    cfg: &RewardConfig,
) -> Result<f64, RewardError> {
    let hit = match cfg.target()? {
        Target::Betti(t) => closeness(betti1(m) as f64, t as f64),
        Target::Weight(t) => closeness(mol_weight(m), t),
    };
    Ok(target_value(hit, reference.similarity(m)?, cfg))
}

pub fn reward(
    m: &MolecularGraph,
    reference: &RewardReference,
    cfg: &RewardConfig,
) -> Result<f64, RewardError> {
    match cfg.mode {
        RewardMode::Constrained => reward_constrained(m, reference, cfg),
        RewardMode::Target => reward_target(m, reference, cfg),
    }
}

/// Reward of the successor state scaled by γ^steps_remaining, so the
/// final step counts in full.
pub fn step_reward(
    s_next: &EnvState,
    reference: &RewardReference,
    cfg: &RewardConfig,
) -> Result<f64, RewardError> {
    let raw = reward(&s_next.molecule, reference, cfg)?;
    Ok(discount(raw, s_next.steps_remaining, cfg.gamma))
}

pub fn discount(raw: f64, steps_remaining: usize, gamma: f64) -> f64 {
    raw * gamma.powi(steps_remaining as i32)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::environment::EnvConfig;
    use crate::molgraph::parse_smiles;

    fn mol(s: &str) -> MolecularGraph {
        parse_smiles(s).unwrap()
    }

    #[test]
    fn agreement_examples() {
        let benzene = mol("c1ccccc1");
        assert_eq!(betti_agreement(&benzene, &benzene), 1.0);
        assert_eq!(betti_agreement(&mol("CCCCCC"), &benzene), 0.0);
        assert_eq!(betti_agreement(&benzene, &mol("c1ccc2ccccc2c1")), 0.5);
    }

    #[test]
    fn constrained_examples() {
        let cfg = RewardConfig {
            lambda: 10.0,
            delta: 0.4,
            epsilon: 0.5,
            ..RewardConfig::default()
        };
        assert_eq!(
            constrained_value(1.25, 0.2, 1.0, &cfg),
            1.25 - 10.0 * (0.4 - 0.2)
        );
        assert_eq!(constrained_value(1.25, 0.4, 0.5, &cfg), 1.25);
        let free = RewardConfig {
            lambda: 0.0,
            ..cfg.clone()
        };
        assert_eq!(constrained_value(1.25, 0.0, 0.0, &free), 1.25);
    }

    #[test]
    fn target_examples() {
        let cfg = RewardConfig {
            mode: RewardMode::Target,
            w: 0.5,
            target_betti: Some(2),
            ..RewardConfig::default()
        };
        assert!((target_value(closeness(1.0, 2.0), 0.8, &cfg) - 0.65).abs() < 1e-15);
        let m0 = mol("c1ccccc1");
        let r = RewardReference::new(&m0, &FingerprintConfig::default()).unwrap();
        let w1 = RewardConfig {
            w: 1.0,
            ..cfg.clone()
        };
        assert_eq!(reward_target(&m0, &r, &w1).unwrap(), 1.0);
        let w0 = RewardConfig {
            w: 0.0,
            target_betti: Some(1),
            ..cfg.clone()
        };
        assert_eq!(reward_target(&m0, &r, &w0).unwrap(), 1.0);
    }

    #[test]
    fn target_needs_exactly_one_goal() {
        let mut cfg = RewardConfig {
            mode: RewardMode::Target,
            ..RewardConfig::default()
        };
        assert!(cfg.validate().is_err());
        cfg.target_betti = Some(1);
        assert!(cfg.validate().is_ok());
        cfg.target_weight = Some(100.0);
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn discounting() {
        assert_eq!(discount(2.0, 0, 0.9), 2.0);
        assert!((discount(2.0, 2, 0.9) - 1.62).abs() < 1e-15);
        assert_eq!(discount(2.0, 5, 1.0), 2.0);
        let m = mol("CCO");
        let cfg = RewardConfig::default();
        let r = RewardReference::new(&m, &FingerprintConfig::default()).unwrap();
        let mut s = EnvState::start(m.clone(), &EnvConfig::default());
        s.steps_remaining = 0;
        assert_eq!(
            step_reward(&s, &r, &cfg).unwrap(),
            reward(&m, &r, &cfg).unwrap()
        );
    }

    #[test]
    fn identical_molecule_is_unpenalized() {
        let m = mol("CC(=O)Nc1ccc(O)cc1");
        let r = RewardReference::new(&m, &FingerprintConfig::default()).unwrap();
        let cfg = RewardConfig {
            lambda: 5.0,
            ..RewardConfig::default()
        };
        assert_eq!(
            reward_constrained(&m, &r, &cfg).unwrap(),
            penalized_logp(&m).unwrap()
        );
    }

    #[test]
    fn betti_ignores_triangles() {
        assert_eq!(betti1(&mol("C1CC1")), 0);
        assert_eq!(betti1(&mol("C1CCC1")), 1);
    }
}
