//! Full-complex persistence by textbook column reduction.
//!
//! Every vertex, edge and triangle with filtration value within the cap is
//! listed, sorted by (value, dimension, vertex tuple), and the whole
//! boundary matrix is reduced at once. No union–find, no per-dimension
//! split.

use std::collections::BTreeSet;

use graphtrl::metric::DistanceMatrix;

#[derive(Debug, Clone, PartialEq)]
pub struct BrutePairs {
    /// (dim, birth, death), sorted, zero-persistence pairs removed.
    pub finite: Vec<(u8, f64, f64)>,
    pub infinite_h0: usize,
    pub infinite_h1: usize,
}

pub fn brute_persistence(dm: &DistanceMatrix, max_filtration: f64) -> BrutePairs {
    let n = dm.len();
    let mut simplices: Vec<(f64, Vec<usize>)> = (0..n).map(|v| (0.0, vec![v])).collect();
    for i in 0..n {
        for j in i + 1..n {
            let d = dm.get(i, j);
            if d <= max_filtration {
                simplices.push((d, vec![i, j]));
            }
        }
    }
    for i in 0..n {
        for j in i + 1..n {
            for k in j + 1..n {
                let v = dm.get(i, j).max(dm.get(i, k)).max(dm.get(j, k));
                if v <= max_filtration {
                    simplices.push((v, vec![i, j, k]));
                }
            }
        }
    }
    simplices.sort_by(|a, b| {
        a.0.total_cmp(&b.0)
            .then(a.1.len().cmp(&b.1.len()))
            .then(a.1.cmp(&b.1))
    });
    let index_of = |verts: &[usize]| simplices.iter().position(|(_, s)| s == verts).unwrap();

    let mut columns: Vec<BTreeSet<usize>> = simplices
        .iter()
        .map(|(_, s)| {
            if s.len() == 1 {
                return BTreeSet::new();
            }
            (0..s.len())
                .map(|skip| {
                    let face: Vec<usize> = s
                        .iter()
                        .enumerate()
                        .filter(|&(k, _)| k != skip)
                        .map(|(_, &v)| v)
                        .collect();
                    index_of(&face)
                })
                .collect()
        })
        .collect();

    let mut low_owner: Vec<Option<usize>> = vec![None; simplices.len()];
    let mut paired = vec![false; simplices.len()];
    let mut finite = Vec::new();
    for j in 0..columns.len() {
        while let Some(low) = columns[j].last().copied() {
            match low_owner[low] {
                Some(k) => {
                    let other = columns[k].clone();
                    let col = &mut columns[j];
                    for r in other {
                        if !col.remove(&r) {
                            col.insert(r);
                        }
                    }
                }
                None => {
                    low_owner[low] = Some(j);
                    paired[low] = true;
                    paired[j] = true;
                    let dim = (simplices[low].1.len() - 1) as u8;
                    let (birth, death) = (simplices[low].0, simplices[j].0);
                    if death > birth {
                        finite.push((dim, birth, death));
                    }
                    break;
                }
            }
        }
    }
    let mut infinite_h0 = 0;
    let mut infinite_h1 = 0;
    for (idx, (_, s)) in simplices.iter().enumerate() {
        // an unpaired simplex with an empty reduced column creates a class
        if !paired[idx] && columns[idx].is_empty() {
            match s.len() {
                1 => infinite_h0 += 1,
                2 => infinite_h1 += 1,
                _ => {}
            }
        }
    }
    finite.sort_by(|a, b| a.partial_cmp(b).unwrap());
    BrutePairs {
        finite,
        infinite_h0,
        infinite_h1,
    }
}
