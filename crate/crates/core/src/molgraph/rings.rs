//! Minimum cycle basis (Horton candidates + GF(2) elimination) and a simple
//! Hückel aromaticity perception on five- and six-membered rings.

use std::collections::{HashMap, HashSet, VecDeque};

use super::{Element, MolecularGraph};

fn bfs_parents(g: &MolecularGraph, root: usize) -> (Vec<usize>, Vec<usize>) {
    let n = g.num_atoms();
    let mut dist = vec![usize::MAX; n];
    let mut parent = vec![usize::MAX; n];
    let mut queue = VecDeque::new();
    dist[root] = 0;
    queue.push_back(root);
    while let Some(u) = queue.pop_front() {
        for &(v, _) in g.neighbors(u) {
            if dist[v] == usize::MAX {
                dist[v] = dist[u] + 1;
                parent[v] = u;
                queue.push_back(v);
            }
        }
    }
    (dist, parent)
}

fn path_from_root(parent: &[usize], root: usize, mut to: usize) -> Vec<usize> {
    let mut path = vec![to];
    while to != root {
        to = parent[to];
        path.push(to);
    }
    path.reverse();
    path
}

struct Gf2Basis {
    rows: HashMap<usize, Vec<u64>>,
}

impl Gf2Basis {
    fn lowest_bit(bits: &[u64]) -> Option<usize> {
        bits.iter()
            .enumerate()
            .find(|(_, w)| **w != 0)
            .map(|(k, w)| k * 64 + w.trailing_zeros() as usize)
    }

    /// Inserts `bits` if it is independent of the rows seen so far.
    fn insert(&mut self, mut bits: Vec<u64>) -> bool {
        while let Some(p) = Self::lowest_bit(&bits) {
            match self.rows.get(&p) {
                Some(row) => {
                    for (w, r) in bits.iter_mut().zip(row) {
                        *w ^= r;
                    }
                }
                None => {
                    self.rows.insert(p, bits);
                    return true;
                }
            }
        }
        false
    }
}

pub(super) fn minimum_cycle_basis(g: &MolecularGraph) -> Vec<Vec<usize>> {
    let rank = g.circuit_rank();
    if rank == 0 {
        return Vec::new();
    }
    let words = g.num_bonds().div_ceil(64);
    let mut seen: HashSet<Vec<u64>> = HashSet::new();
    let mut candidates: Vec<(Vec<usize>, Vec<usize>, Vec<u64>)> = Vec::new();

    for root in 0..g.num_atoms() {
        let (dist, parent) = bfs_parents(g, root);
        for bond in g.bonds() {
            let (x, y) = (bond.a, bond.b);
            if dist[x] + dist[y] + 1 < 3 {
                continue;
            }
            let px = path_from_root(&parent, root, x);
            let py = path_from_root(&parent, root, y);
            let sx: HashSet<usize> = px.iter().copied().collect();
            if py[1..].iter().any(|v| sx.contains(v)) {
                continue;
            }
            let mut cycle = px;
            cycle.extend(py[1..].iter().rev());
            let mut bits = vec![0u64; words];
            let mut edges = Vec::with_capacity(cycle.len());
            for k in 0..cycle.len() {
                let b = g
                    .bond_between(cycle[k], cycle[(k + 1) % cycle.len()])
                    .expect("cycle edge");
                bits[b / 64] |= 1 << (b % 64);
                edges.push(b);
            }
            if seen.insert(bits.clone()) {
                edges.sort_unstable();
                candidates.push((cycle, edges, bits));
            }
        }
    }
    candidates.sort_by(|a, b| a.0.len().cmp(&b.0.len()).then_with(|| a.1.cmp(&b.1)));

    let mut basis = Gf2Basis {
        rows: HashMap::new(),
    };
    let mut rings = Vec::with_capacity(rank);
    for (cycle, _, bits) in candidates {
        if basis.insert(bits) {
            rings.push(cycle);
            if rings.len() == rank {
                break;
            }
        }
    }
    rings
}

/// Per-atom aromatic flags. A five- or six-membered basis ring is aromatic
/// when every atom is sp2-like and the π-electron count is 4n + 2. A double
/// bond from a ring atom into a fused ring counts as one electron.
pub(super) fn perceive_aromaticity(g: &MolecularGraph) -> Vec<bool> {
    let mut aromatic = vec![false; g.num_atoms()];
    for ring in g.rings() {
        if ring.len() != 5 && ring.len() != 6 {
            continue;
        }
        let members: HashSet<usize> = ring.iter().copied().collect();
        let mut electrons = 0usize;
        let mut ok = true;
        for &a in ring {
            match ring_atom_electrons(g, a, &members) {
                Some(e) => electrons += e,
                None => {
                    ok = false;
                    break;
                }
            }
        }
        if ok && electrons % 4 == 2 {
            for &a in ring {
                aromatic[a] = true;
            }
        }
    }
    aromatic
}

fn ring_atom_electrons(g: &MolecularGraph, a: usize, members: &HashSet<usize>) -> Option<usize> {
    let atom = g.atom(a);
    let mut in_ring_double = false;
    let mut fused_double = false;
    let mut exo_double = false;
    for &(n, b) in g.neighbors(a) {
        match g.bond(b).order {
            1 => {}
            2 => {
                if members.contains(&n) {
                    in_ring_double = true;
                } else if g.is_ring_bond(b) {
                    fused_double = true;
                } else {
                    exo_double = true;
                }
            }
            _ => return None,
        }
    }
    if in_ring_double || fused_double {
        return Some(1);
    }
    if exo_double {
        return match atom.element {
            Element::C => Some(0),
            _ => None,
        };
    }
    match (atom.element, atom.formal_charge) {
        (Element::N | Element::P, 0) | (Element::O | Element::S, 0) | (Element::C, -1) => Some(2),
        (Element::B, 0) | (Element::C, 1) => Some(0),
        _ => None,
    }
}

#[cfg(test)]
mod tests {
    use crate::molgraph::parse_smiles;

    #[test]
    fn fused_basis_sizes() {
        let g = parse_smiles("c1ccc2ccccc2c1").unwrap();
        let mut sizes: Vec<usize> = g.rings().iter().map(Vec::len).collect();
        sizes.sort();
        assert_eq!(sizes, vec![6, 6]);
        assert!(g.atoms().iter().all(|a| a.aromatic));
    }

    #[test]
    fn cubane_basis_is_five_squares() {
        let g = parse_smiles("C12C3C4C1C5C2C3C45").unwrap();
        assert_eq!(g.circuit_rank(), 5);
        assert!(g.rings().iter().all(|r| r.len() == 4));
    }

    #[test]
    fn aromaticity_examples() {
        for (smi, expect) in [
            ("c1ccccc1", true),
            ("c1cc[nH]c1", true),
            ("c1ccoc1", true),
            ("c1ccsc1", true),
            ("C1=CCC=C1", false),
            ("C1CCCCC1", false),
            ("O=C1C=CC(=O)C=C1", false),
            ("O=c1cccc[nH]1", true),
            ("Cn1cnc2c1c(=O)n(C)c(=O)n2C", true),
        ] {
            let g = parse_smiles(smi).unwrap();
            assert_eq!(g.atom(1).aromatic || g.atom(2).aromatic, expect, "{smi}");
        }
    }
}
