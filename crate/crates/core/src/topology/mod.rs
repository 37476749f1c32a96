//! Persistent homology of the atom metric space.
//!
//! The Rips filtration on geodesic distances admits every bond at exactly
//! the bond-length scale, so just above that scale β₀ = 1 and β₁ equals the
//! circuit rank of the bond graph for rings of four or more atoms. A
//! three-membered ring is filled by its own triangle at the same scale and
//! never shows up in H₁.

mod image;
mod rips;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use image::{persistence_image, ImageConfig, PersistenceImage};
pub use rips::{betti_at, rips_persistence, PersistenceDiagram, PersistencePair};

use crate::metric::DistanceMatrix;

pub const DEFAULT_MAX_FILTRATION: f64 = 6.0;

/// Betti numbers are read at this multiple of the bond length scale.
pub const BETTI_SCALE_FACTOR: f64 = 1.05;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum TopologyError {
    #[error("invalid topology configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct TopologyConfig {
    pub max_filtration: f64,
    pub image: ImageConfig,
}

impl Default for TopologyConfig {
    fn default() -> Self {
        TopologyConfig {
            max_filtration: DEFAULT_MAX_FILTRATION,
            image: ImageConfig::for_filtration(DEFAULT_MAX_FILTRATION),
        }
    }
}

impl TopologyConfig {
    pub fn validate(&self) -> Result<(), TopologyError> {
        if !(self.max_filtration > 0.0) {
            return Err(TopologyError::Config(
                "max_filtration must be positive".into(),
            ));
        }
        self.image.validate()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TopologySummary {
    pub betti0: usize,
    pub betti1: usize,
    pub diagram: PersistenceDiagram,
}

/// Diagram plus Betti numbers at `BETTI_SCALE_FACTOR × bond_length_scale`.
pub fn topology_summary(
    dm: &DistanceMatrix,
    bond_length_scale: f64,
    cfg: &TopologyConfig,
) -> Result<TopologySummary, TopologyError> {
    cfg.validate()?;
    let diagram = rips_persistence(dm, 1, cfg.max_filtration);
    let (betti0, betti1) = betti_at(&diagram, BETTI_SCALE_FACTOR * bond_length_scale);
    Ok(TopologySummary {
        betti0,
        betti1,
        diagram,
    })
}
