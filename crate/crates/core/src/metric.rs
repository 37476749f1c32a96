//! Inter-atomic distances from the bond graph.
//!
//! Distances are shortest-path hop counts scaled by a nominal bond length.
//! No 3D embedding is performed, so every quantity downstream is a
//! deterministic function of the molecular graph.

use thiserror::Error;

use crate::molgraph::MolecularGraph;

pub const DEFAULT_BOND_LENGTH: f64 = 1.5;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricError {
    #[error("graph is disconnected; geodesic distances are undefined")]
    Disconnected,
    #[error("bond length scale must be positive, got {0}")]
    NonPositiveScale(f64),
    #[error("distance matrix data has {got} entries, expected {expected}")]
    Shape { expected: usize, got: usize },
}

/// Symmetric n×n distance matrix in Å with a zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct DistanceMatrix {
    n: usize,
    d: Vec<f64>,
}

impl DistanceMatrix {
    /// Wraps row-major data. Symmetry is the caller's responsibility.
    pub fn from_row_major(n: usize, d: Vec<f64>) -> Result<Self, MetricError> {
        if d.len() != n * n {
            return Err(MetricError::Shape {
                expected: n * n,
                got: d.len(),
            });
        }
        Ok(DistanceMatrix { n, d })
    }

    pub fn len(&self) -> usize {
        self.n
    }

    pub fn is_empty(&self) -> bool {
        self.n == 0
    }

    #[inline]
    pub fn get(&self, i: usize, j: usize) -> f64 {
        self.d[i * self.n + j]
    }

    /// Principal submatrix on the given points, in the given order.
    pub fn submatrix(&self, points: &[usize]) -> DistanceMatrix {
        let m = points.len();
        let mut d = Vec::with_capacity(m * m);
        for &i in points {
            for &j in points {
                d.push(self.get(i, j));
            }
        }
        DistanceMatrix { n: m, d }
    }
}

pub fn geodesic_distances(
    g: &MolecularGraph,
    bond_length_scale: f64,
) -> Result<DistanceMatrix, MetricError> {
    if !(bond_length_scale > 0.0) {
        return Err(MetricError::NonPositiveScale(bond_length_scale));
    }
    let n = g.num_atoms();
    let mut d = vec![0.0; n * n];
    for i in 0..n {
        let hops = g.hop_distances(i);
        for (j, h) in hops.into_iter().enumerate() {
            if h == usize::MAX {
                return Err(MetricError::Disconnected);
            }
            d[i * n + j] = bond_length_scale * h as f64;
        }
    }
    Ok(DistanceMatrix { n, d })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn dm(s: &str) -> DistanceMatrix {
        geodesic_distances(&parse_smiles(s).unwrap(), DEFAULT_BOND_LENGTH).unwrap()
    }

    #[test]
    fn bonded_pair() {
        assert_eq!(dm("CC").get(0, 1), 1.5);
    }

    #[test]
    fn chain() {
        assert_eq!(dm("CCC").get(0, 2), 3.0);
    }

    #[test]
    fn benzene_para() {
        let d = dm("c1ccccc1");
        assert_eq!(d.get(0, 3), 4.5);
        assert_eq!(d.get(1, 4), 4.5);
    }

    #[test]
    fn rejects_bad_scale() {
        let g = parse_smiles("CC").unwrap();
        assert_eq!(
            geodesic_distances(&g, 0.0).unwrap_err(),
            MetricError::NonPositiveScale(0.0)
        );
    }

    #[test]
    fn metric_axioms_on_ring_system() {
        let d = dm("c1ccc2c(c1)CCC2CO");
        for i in 0..d.len() {
            assert_eq!(d.get(i, i), 0.0);
            for j in 0..d.len() {
                assert_eq!(d.get(i, j), d.get(j, i));
                if i != j {
                    assert!(d.get(i, j) > 0.0);
                }
                for k in 0..d.len() {
                    assert!(d.get(i, k) <= d.get(i, j) + d.get(j, k));
                }
            }
        }
    }
}
