//! State featurization: MWCG features, persistence image, fingerprint bits
//! and the fraction of steps remaining, concatenated in that order.

use std::collections::HashMap;
use std::sync::{Arc, Mutex};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use super::{EnvConfig, EnvState};
use crate::fingerprint::{
    fnv1a64, morgan_fingerprint, Fingerprint, FingerprintConfig, FingerprintError,
};
use crate::metric::{geodesic_distances, MetricError, DEFAULT_BOND_LENGTH};
use crate::molgraph::{canonical_ranks, write_smiles, MolecularGraph};
use crate::mwcg::{mwcg_features, MwcgConfig, MwcgError};
use crate::topology::{
    persistence_image, topology_summary, PersistenceDiagram, PersistenceImage, TopologyConfig,
    TopologyError,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum FeatureError {
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Mwcg(#[from] MwcgError),
    #[error(transparent)]
    Topology(#[from] TopologyError),
    #[error(transparent)]
    Fingerprint(#[from] FingerprintError),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FeatureConfig {
    pub bond_length_scale: f64,
    pub mwcg: MwcgConfig,
    pub topology: TopologyConfig,
    pub fingerprint: FingerprintConfig,
}

impl Default for FeatureConfig {
    fn default() -> Self {
        FeatureConfig {
            bond_length_scale: DEFAULT_BOND_LENGTH,
            mwcg: MwcgConfig::default(),
            topology: TopologyConfig::default(),
            fingerprint: FingerprintConfig::default(),
        }
    }
}

impl FeatureConfig {
    pub fn validate(&self) -> Result<(), FeatureError> {
        if !(self.bond_length_scale > 0.0) {
            return Err(MetricError::NonPositiveScale(self.bond_length_scale).into());
        }
        self.mwcg.validate()?;
        self.topology.validate()?;
        self.fingerprint.validate()?;
        Ok(())
    }

    /// Entries describing the molecule, excluding the trailing step entry.
    pub fn molecule_len(&self) -> usize {
        self.mwcg.feature_len() + self.topology.image.vector_len() + self.fingerprint.nbits
    }

    pub fn state_len(&self) -> usize {
        self.molecule_len() + 1
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct MoleculeFeatures {
    pub mwcg: Vec<f64>,
    pub diagram: PersistenceDiagram,
    pub image: PersistenceImage,
    pub fingerprint: Fingerprint,
    pub betti0: usize,
    pub betti1: usize,
}

impl MoleculeFeatures {
    fn write_dense(&self, out: &mut Vec<f64>) {
        out.extend_from_slice(&self.mwcg);
        out.extend_from_slice(&self.image.values);
        out.extend((0..self.fingerprint.len()).map(|b| self.fingerprint.get(b) as u8 as f64));
    }
}

/// Features are computed on the canonically renumbered molecule, so
/// floating-point sums run in the same order for every atom numbering.
pub fn molecule_features(
    g: &MolecularGraph,
    cfg: &FeatureConfig,
) -> Result<MoleculeFeatures, FeatureError> {
    let canonical = g
        .relabeled(&canonical_ranks(g))
        .expect("renumbering a valid molecule keeps it valid");
    let g = &canonical;
    let dm = geodesic_distances(g, cfg.bond_length_scale)?;
    let mwcg = mwcg_features(g, &dm, &cfg.mwcg)?.values;
    let summary = topology_summary(&dm, cfg.bond_length_scale, &cfg.topology)?;
    let image = persistence_image(&summary.diagram, &cfg.topology.image)?;
    let fingerprint = morgan_fingerprint(g, &cfg.fingerprint)?;
    Ok(MoleculeFeatures {
        mwcg,
        diagram: summary.diagram,
        image,
        fingerprint,
        betti0: summary.betti0,
        betti1: summary.betti1,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct StateVector {
    pub values: Vec<f64>,
}

pub fn featurize(s: &EnvState, cfg: &EnvConfig) -> Result<StateVector, FeatureError> {
    let features = molecule_features(&s.molecule, &cfg.features)?;
    let mut values = Vec::with_capacity(cfg.features.state_len());
    features.write_dense(&mut values);
    values.push(s.steps_remaining as f64 / cfg.max_steps as f64);
    Ok(StateVector { values })
}

/// Hex FNV-1a digest of the little-endian bytes of every entry.
pub fn state_vector_hash(v: &StateVector) -> String {
    let bytes: Vec<u8> = v.values.iter().flat_map(|x| x.to_le_bytes()).collect();
    format!("{:016x}", fnv1a64(&bytes))
}

/// Compact state vector: non-zero entries only, in single precision.
/// Entries smaller than `SPARSE_EPSILON` (persistence-image tails) are
/// dropped.
#[derive(Debug, Clone, PartialEq)]
pub struct SparseVector {
    pub dim: usize,
    pub indices: Vec<u32>,
    pub values: Vec<f32>,
}

pub const SPARSE_EPSILON: f64 = 1e-9;

impl SparseVector {
    pub fn from_dense(dense: &[f64]) -> Self {
        let (mut indices, mut values) = (Vec::new(), Vec::new());
        for (i, &x) in dense.iter().enumerate() {
            if x.abs() >= SPARSE_EPSILON {
                indices.push(i as u32);
                values.push(x as f32);
            }
        }
        SparseVector {
            dim: dense.len(),
            indices,
            values,
        }
    }

    pub fn to_dense(&self) -> Vec<f64> {
        let mut out = vec![0.0; self.dim];
        for (&i, &x) in self.indices.iter().zip(&self.values) {
            out[i as usize] = x as f64;
        }
        out
    }

    pub fn nnz(&self) -> usize {
        self.indices.len()
    }
}

/// Featurizes states through a cache of molecule features keyed by
/// canonical SMILES. The cache is cleared wholesale once it reaches
/// `capacity` entries, which keeps memory bounded without making the
/// output depend on eviction order.
pub struct Featurizer {
    cfg: FeatureConfig,
    max_steps: usize,
    capacity: usize,
    cache: Mutex<HashMap<String, Arc<SparseVector>>>,
}

impl Featurizer {
    pub fn new(cfg: FeatureConfig, max_steps: usize, capacity: usize) -> Self {
        Featurizer {
            cfg,
            max_steps,
            capacity,
            cache: Mutex::new(HashMap::new()),
        }
    }

    pub fn config(&self) -> &FeatureConfig {
        &self.cfg
    }

    pub fn state_len(&self) -> usize {
        self.cfg.state_len()
    }

    pub fn max_steps(&self) -> usize {
        self.max_steps
    }

    /// Sparse molecule features without the step entry, shared through the
    /// cache.
    pub fn molecule_sparse(&self, g: &MolecularGraph) -> Result<Arc<SparseVector>, FeatureError> {
        let key = write_smiles(g);
        if let Some(hit) = self.cache.lock().unwrap().get(&key) {
            return Ok(Arc::clone(hit));
        }
        let mut dense = Vec::with_capacity(self.cfg.molecule_len());
        molecule_features(g, &self.cfg)?.write_dense(&mut dense);
        let sparse = Arc::new(SparseVector::from_dense(&dense));
        let mut cache = self.cache.lock().unwrap();
        if cache.len() >= self.capacity {
            cache.clear();
        }
        cache.insert(key, Arc::clone(&sparse));
        Ok(sparse)
    }

    pub fn sparse(&self, s: &EnvState) -> Result<SparseVector, FeatureError> {
        let part = self.molecule_sparse(&s.molecule)?;
        let mut indices = Vec::with_capacity(part.nnz() + 1);
        let mut values = Vec::with_capacity(part.nnz() + 1);
        indices.extend_from_slice(&part.indices);
        values.extend_from_slice(&part.values);
        let frac = s.steps_remaining as f64 / self.max_steps as f64;
        if frac >= SPARSE_EPSILON {
            indices.push(self.cfg.molecule_len() as u32);
            values.push(frac as f32);
        }
        Ok(SparseVector {
            dim: self.cfg.state_len(),
            indices,
            values,
        })
    }

    pub fn cached(&self) -> usize {
        self.cache.lock().unwrap().len()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    #[test]
    fn layout_length() {
        let cfg = EnvConfig::default();
        assert_eq!(cfg.features.state_len(), 276 * 4 * 3 + 200 + 1024 + 1);
        let s = EnvState::start(parse_smiles("c1ccccc1O").unwrap(), &cfg);
        assert_eq!(
            featurize(&s, &cfg).unwrap().values.len(),
            cfg.features.state_len()
        );
    }

    #[test]
    fn steps_only_touch_last_entry() {
        let cfg = EnvConfig::default();
        let s = EnvState::start(parse_smiles("CCN").unwrap(), &cfg);
        let mut t = s.clone();
        t.steps_remaining = 3;
        let (a, b) = (featurize(&s, &cfg).unwrap(), featurize(&t, &cfg).unwrap());
        let n = a.values.len();
        assert_eq!(a.values[..n - 1], b.values[..n - 1]);
        assert_eq!(a.values[n - 1], 1.0);
        assert_eq!(b.values[n - 1], 0.15);
        assert_ne!(state_vector_hash(&a), state_vector_hash(&b));
    }

    #[test]
    fn sparse_matches_dense() {
        let cfg = EnvConfig::default();
        let s = EnvState::start(parse_smiles("CC(=O)Nc1ccc(O)cc1").unwrap(), &cfg);
        let dense = featurize(&s, &cfg).unwrap().values;
        let fz = Featurizer::new(cfg.features.clone(), cfg.max_steps, 4);
        let sparse = fz.sparse(&s).unwrap();
        assert_eq!(sparse.dim, dense.len());
        for (x, y) in sparse.to_dense().iter().zip(&dense) {
            if y.abs() >= SPARSE_EPSILON {
                assert!((x - y).abs() <= 1e-6 * y.abs().max(1.0));
            } else {
                assert_eq!(*x, 0.0);
            }
        }
        assert_eq!(fz.sparse(&s).unwrap(), sparse);
        assert_eq!(fz.cached(), 1);
    }
}
