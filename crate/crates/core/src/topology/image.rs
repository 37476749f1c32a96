//! Persistence images: diagrams rasterized onto a fixed (birth, persistence)
//! grid so they can be concatenated into a feature vector.

use serde::{Deserialize, Serialize};

use super::rips::PersistenceDiagram;
use super::TopologyError;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ImageConfig {
    pub rows: usize,
    pub cols: usize,
    pub sigma: f64,
    /// `[lo, hi]` along the birth axis (columns).
    pub birth_range: [f64; 2],
    /// `[lo, hi]` along the persistence axis (rows). `hi` also sets the
    /// point where the linear weight saturates at 1.
    pub persistence_range: [f64; 2],
    /// Deaths at infinity are clipped here before imaging.
    pub max_filtration: f64,
}

impl Default for ImageConfig {
    fn default() -> Self {
        ImageConfig::for_filtration(super::DEFAULT_MAX_FILTRATION)
    }
}

impl ImageConfig {
    pub fn for_filtration(max_filtration: f64) -> Self {
        ImageConfig {
            rows: 10,
            cols: 10,
            sigma: 0.5,
            birth_range: [0.0, max_filtration],
            persistence_range: [0.0, max_filtration],
            max_filtration,
        }
    }

    pub fn validate(&self) -> Result<(), TopologyError> {
        if self.rows == 0 || self.cols == 0 {
            return Err(TopologyError::Config("image grid must be non-empty".into()));
        }
        if !(self.sigma > 0.0) || !self.sigma.is_finite() {
            return Err(TopologyError::Config(format!(
                "sigma must be positive, got {}",
                self.sigma
            )));
        }
        for (name, [lo, hi]) in [
            ("birth", self.birth_range),
            ("persistence", self.persistence_range),
        ] {
            if !(lo.is_finite() && hi.is_finite() && hi > lo) {
                return Err(TopologyError::Config(format!(
                    "degenerate {name} range [{lo}, {hi}]"
                )));
            }
        }
        if !(self.persistence_range[1] > 0.0) {
            return Err(TopologyError::Config(
                "persistence upper bound must be positive".into(),
            ));
        }
        if !(self.max_filtration > 0.0) {
            return Err(TopologyError::Config(
                "max_filtration must be positive".into(),
            ));
        }
        Ok(())
    }

    /// Entries per homology dimension.
    pub fn cells(&self) -> usize {
        self.rows * self.cols
    }

    pub fn vector_len(&self) -> usize {
        2 * self.cells()
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PersistenceImage {
    pub rows: usize,
    pub cols: usize,
    /// H₀ grid then H₁ grid, each row-major with rows along persistence.
    pub values: Vec<f64>,
}

impl PersistenceImage {
    pub fn grid(&self, dim: u8) -> &[f64] {
        let cells = self.rows * self.cols;
        let start = dim as usize * cells;
        &self.values[start..start + cells]
    }

    pub fn csv_row(&self) -> String {
        self.values
            .iter()
            .map(|v| v.to_string())
            .collect::<Vec<_>>()
            .join(",")
    }
}

pub fn persistence_image(
    diagram: &PersistenceDiagram,
    cfg: &ImageConfig,
) -> Result<PersistenceImage, TopologyError> {
    cfg.validate()?;
    let cells = cfg.cells();
    let mut values = vec![0.0; 2 * cells];
    let [b_lo, b_hi] = cfg.birth_range;
    let [p_lo, p_hi] = cfg.persistence_range;
    let bw = (b_hi - b_lo) / cfg.cols as f64;
    let ph = (p_hi - p_lo) / cfg.rows as f64;
    let var = cfg.sigma * cfg.sigma;
    let norm = bw * ph / (2.0 * std::f64::consts::PI * var);

    for pair in &diagram.pairs {
        if pair.dim > 1 {
            continue;
        }
        let death = pair.death.min(cfg.max_filtration);
        let pers = death - pair.birth;
        let w = (pers / p_hi).clamp(0.0, 1.0);
        if w == 0.0 {
            continue;
        }
        let grid = &mut values[pair.dim as usize * cells..(pair.dim as usize + 1) * cells];
        for r in 0..cfg.rows {
            let y = p_lo + (r as f64 + 0.5) * ph - pers;
            for c in 0..cfg.cols {
                let x = b_lo + (c as f64 + 0.5) * bw - pair.birth;
                grid[r * cfg.cols + c] += w * norm * (-(x * x + y * y) / (2.0 * var)).exp();
            }
        }
    }
    Ok(PersistenceImage {
        rows: cfg.rows,
        cols: cfg.cols,
        values,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::PersistencePair;

    fn pair(dim: u8, birth: f64, death: f64) -> PersistencePair {
        PersistencePair { dim, birth, death }
    }

    #[test]
    fn empty_diagram_is_zero() {
        let img =
            persistence_image(&PersistenceDiagram::default(), &ImageConfig::default()).unwrap();
        assert_eq!(img.values.len(), 200);
        assert!(img.values.iter().all(|&v| v == 0.0));
    }

    #[test]
    fn infinite_class_is_clipped() {
        let cfg = ImageConfig::default();
        let inf = PersistenceDiagram {
            pairs: vec![pair(0, 0.0, f64::INFINITY)],
        };
        let clipped = PersistenceDiagram {
            pairs: vec![pair(0, 0.0, cfg.max_filtration)],
        };
        assert_eq!(
            persistence_image(&inf, &cfg).unwrap(),
            persistence_image(&clipped, &cfg).unwrap()
        );
    }

    #[test]
    fn dimensions_land_in_their_own_grid() {
        let dg = PersistenceDiagram {
            pairs: vec![pair(1, 1.5, 3.0)],
        };
        let img = persistence_image(&dg, &ImageConfig::default()).unwrap();
        assert!(img.grid(0).iter().all(|&v| v == 0.0));
        assert!(img.grid(1).iter().any(|&v| v > 0.0));
    }

    #[test]
    fn degenerate_bounds_rejected() {
        let cfg = ImageConfig {
            birth_range: [1.0, 1.0],
            ..ImageConfig::default()
        };
        assert!(matches!(
            persistence_image(&PersistenceDiagram::default(), &cfg),
            Err(TopologyError::Config(_))
        ));
        let cfg = ImageConfig {
            sigma: 0.0,
            ..ImageConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
