//! Vietoris–Rips persistence in dimensions 0 and 1 over ℤ/2.
//!
//! H₀ comes from a union–find sweep over edges in filtration order. H₁ comes
//! from reducing the triangle columns of the boundary matrix against the
//! edge rows; a reduced column with pivot edge e kills the cycle born at e.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::metric::DistanceMatrix;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PersistencePair {
    pub dim: u8,
    pub birth: f64,
    /// `f64::INFINITY` for classes that survive the whole filtration.
    pub death: f64,
}

impl PersistencePair {
    pub fn persistence(&self) -> f64 {
        self.death - self.birth
    }

    pub fn is_infinite(&self) -> bool {
        self.death.is_infinite()
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct PersistenceDiagram {
    pub pairs: Vec<PersistencePair>,
}

impl PersistenceDiagram {
    pub fn dimension(&self, dim: u8) -> impl Iterator<Item = &PersistencePair> {
        self.pairs.iter().filter(move |p| p.dim == dim)
    }

    /// CSV rows `dim,birth,death` with `inf` for infinite deaths.
    pub fn csv_rows(&self) -> Vec<String> {
        self.pairs
            .iter()
            .map(|p| format!("{},{},{}", p.dim, p.birth, format_death(p.death)))
            .collect()
    }
}

fn format_death(d: f64) -> String {
    if d.is_infinite() {
        "inf".to_string()
    } else {
        d.to_string()
    }
}

impl fmt::Display for PersistenceDiagram {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for row in self.csv_rows() {
            writeln!(f, "{row}")?;
        }
        Ok(())
    }
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind {
            parent: (0..n).collect(),
        }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }
}

/// Sorted-index symmetric difference of two ℤ/2 columns.
fn add_columns(target: &mut Vec<u32>, other: &[u32]) {
    let mut out = Vec::with_capacity(target.len() + other.len());
    let (mut i, mut j) = (0, 0);
    while i < target.len() && j < other.len() {
        match target[i].cmp(&other[j]) {
            std::cmp::Ordering::Less => {
                out.push(target[i]);
                i += 1;
            }
            std::cmp::Ordering::Greater => {
                out.push(other[j]);
                j += 1;
            }
            std::cmp::Ordering::Equal => {
                i += 1;
                j += 1;
            }
        }
    }
    out.extend_from_slice(&target[i..]);
    out.extend_from_slice(&other[j..]);
    *target = out;
}

/// Persistence pairs of the Rips filtration truncated at `max_filtration`.
/// Zero-persistence pairs are dropped. `max_dim` above 1 is treated as 1.
pub fn rips_persistence(
    dm: &DistanceMatrix,
    max_dim: usize,
    max_filtration: f64,
) -> PersistenceDiagram {
    let n = dm.len();
    let mut edges: Vec<(f64, usize, usize)> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let d = dm.get(i, j);
            if d <= max_filtration {
                edges.push((d, i, j));
            }
        }
    }
    edges.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));

    let mut pairs = Vec::new();
    let mut uf = UnionFind::new(n);
    let mut positive = vec![false; edges.len()];
    for (k, &(d, i, j)) in edges.iter().enumerate() {
        let (ri, rj) = (uf.find(i), uf.find(j));
        if ri == rj {
            positive[k] = true;
            continue;
        }
        // Every vertex is born at 0; the component holding the lower vertex
        // index is the elder and survives.
        let (elder, younger) = if ri < rj { (ri, rj) } else { (rj, ri) };
        uf.parent[younger] = elder;
        if d > 0.0 {
            pairs.push(PersistencePair {
                dim: 0,
                birth: 0.0,
                death: d,
            });
        }
    }
    for v in 0..n {
        if uf.find(v) == v {
            pairs.push(PersistencePair {
                dim: 0,
                birth: 0.0,
                death: f64::INFINITY,
            });
        }
    }
    if max_dim == 0 {
        return PersistenceDiagram { pairs };
    }

    let mut edge_id = vec![u32::MAX; n * n];
    for (k, &(_, i, j)) in edges.iter().enumerate() {
        edge_id[i * n + j] = k as u32;
        edge_id[j * n + i] = k as u32;
    }
    let mut triangles: Vec<(f64, [u32; 3])> = Vec::new();
    for i in 0..n {
        for j in i + 1..n {
            let eij = edge_id[i * n + j];
            if eij == u32::MAX {
                continue;
            }
            for k in j + 1..n {
                let (eik, ejk) = (edge_id[i * n + k], edge_id[j * n + k]);
                if eik == u32::MAX || ejk == u32::MAX {
                    continue;
                }
                let mut col = [eij, eik, ejk];
                col.sort_unstable();
                let value = edges[col[2] as usize].0;
                triangles.push((value, col));
            }
        }
    }
    // filtration value, then colexicographic on edge indices
    triangles.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1[2].cmp(&b.1[2]))
            .then(a.1[1].cmp(&b.1[1]))
            .then(a.1[0].cmp(&b.1[0]))
    });

    let mut pivot_of: Vec<Option<usize>> = vec![None; edges.len()];
    let mut reduced: Vec<Vec<u32>> = Vec::with_capacity(triangles.len());
    let mut killed = vec![false; edges.len()];
    let remaining_positive = positive.iter().filter(|&&p| p).count();
    let mut paired = 0usize;
    for (value, col) in &triangles {
        if paired == remaining_positive {
            break;
        }
        let mut column: Vec<u32> = col.to_vec();
        while let Some(&low) = column.last() {
            match pivot_of[low as usize] {
                Some(other) => {
                    let other_col = std::mem::take(&mut reduced[other]);
                    add_columns(&mut column, &other_col);
                    reduced[other] = other_col;
                }
                None => break,
            }
        }
        let idx = reduced.len();
        if let Some(&low) = column.last() {
            pivot_of[low as usize] = Some(idx);
            killed[low as usize] = true;
            paired += 1;
            let birth = edges[low as usize].0;
            if *value > birth {
                pairs.push(PersistencePair {
                    dim: 1,
                    birth,
                    death: *value,
                });
            }
        }
        reduced.push(column);
    }
    for (k, &(d, _, _)) in edges.iter().enumerate() {
        if positive[k] && !killed[k] {
            pairs.push(PersistencePair {
                dim: 1,
                birth: d,
                death: f64::INFINITY,
            });
        }
    }
    PersistenceDiagram { pairs }
}

/// Classes alive at scale `t` (birth ≤ t < death) in dimensions 0 and 1.
pub fn betti_at(diagram: &PersistenceDiagram, t: f64) -> (usize, usize) {
    let alive = |dim: u8| {
        diagram
            .dimension(dim)
            .filter(|p| p.birth <= t && t < p.death)
            .count()
    };
    (alive(0), alive(1))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn matrix(n: usize, d: &[f64]) -> DistanceMatrix {
        DistanceMatrix::from_row_major(n, d.to_vec()).unwrap()
    }

    #[test]
    fn single_point() {
        let dg = rips_persistence(&matrix(1, &[0.0]), 1, 10.0);
        assert_eq!(
            dg.pairs,
            vec![PersistencePair {
                dim: 0,
                birth: 0.0,
                death: f64::INFINITY
            }]
        );
    }

    #[test]
    fn two_points() {
        let dg = rips_persistence(&matrix(2, &[0.0, 2.5, 2.5, 0.0]), 1, 10.0);
        assert_eq!(dg.pairs.len(), 2);
        assert_eq!(dg.pairs[0].death, 2.5);
        assert!(dg.pairs[1].is_infinite());
    }

    #[test]
    fn square_cycle() {
        // cyclobutane geodesics at 1.5 Å per bond
        let (a, b) = (1.5, 3.0);
        let d = [
            0.0, a, b, a, //
            a, 0.0, a, b, //
            b, a, 0.0, a, //
            a, b, a, 0.0,
        ];
        let dg = rips_persistence(&matrix(4, &d), 1, 10.0);
        let h1: Vec<_> = dg.dimension(1).collect();
        assert_eq!(h1.len(), 1);
        assert_eq!((h1[0].birth, h1[0].death), (1.5, 3.0));
        assert_eq!(betti_at(&dg, 0.0), (4, 0));
        assert_eq!(betti_at(&dg, 1.6), (1, 1));
        assert_eq!(betti_at(&dg, 3.0), (1, 0));
    }

    #[test]
    fn truncation_leaves_essential_cycle() {
        let (a, b) = (1.5, 3.0);
        let d = [0.0, a, b, a, a, 0.0, a, b, b, a, 0.0, a, a, b, a, 0.0];
        let dg = rips_persistence(&matrix(4, &d), 1, 2.0);
        let h1: Vec<_> = dg.dimension(1).collect();
        assert_eq!(h1.len(), 1);
        assert!(h1[0].is_infinite());
    }

    #[test]
    fn column_addition() {
        let mut a = vec![1, 3, 5];
        add_columns(&mut a, &[3, 4]);
        assert_eq!(a, vec![1, 4, 5]);
    }
}
