//! Molecular graphs: SMILES parsing and writing, valence bookkeeping, ring
//! perception and SYBYL atom typing.
//!
//! A [`MolecularGraph`] is immutable once built and is always connected,
//! kekulized and valence-valid. Edits go through [`MolecularGraph::new`],
//! which revalidates everything.

mod element;
mod kekulize;
mod parse;
mod rings;
mod sybyl;
mod write;

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use element::{Element, HYDROGEN_MASS};
pub use parse::{parse_smiles, read_smiles_lines, SmilesLine};
pub use sybyl::{sybyl_type, SybylType, SYBYL_TYPES};
pub use write::{canonical_ranks, write_smiles};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum MolError {
    #[error("SMILES syntax error at byte {position}: {message}")]
    Syntax { position: usize, message: String },
    #[error("valence exceeded on atom {atom} ({element})")]
    Valence { atom: usize, element: Element },
    #[error("cannot kekulize aromatic system containing atom {atom}")]
    Kekulization { atom: usize },
    #[error("molecule has more than one fragment")]
    Disconnected,
    #[error("formal charge {charge} on atom {atom} is outside {{-1, 0, +1}}")]
    UnsupportedCharge { atom: usize, charge: i8 },
    #[error("invalid bond between {a} and {b}: {message}")]
    InvalidBond { a: usize, b: usize, message: String },
    #[error("molecule has no atoms")]
    Empty,
}

pub(crate) fn syntax(position: usize, message: impl Into<String>) -> MolError {
    MolError::Syntax {
        position,
        message: message.into(),
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct Atom {
    pub element: Element,
    pub formal_charge: i8,
    /// Hydrogens written explicitly in a bracket atom. These are not
    /// replaceable by graph edits until the implicit hydrogens run out.
    pub explicit_h: u8,
    /// Aromaticity perceived on the kekulized structure. Ignored on input to
    /// [`MolecularGraph::new`].
    pub aromatic: bool,
}

impl Atom {
    pub fn new(element: Element) -> Self {
        Atom {
            element,
            formal_charge: 0,
            explicit_h: 0,
            aromatic: false,
        }
    }

    pub fn with_charge(mut self, charge: i8) -> Self {
        self.formal_charge = charge;
        self
    }

    pub fn with_explicit_h(mut self, h: u8) -> Self {
        self.explicit_h = h;
        self
    }
}

/// Kekulé bond; endpoints are stored with `a < b`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Bond {
    pub a: usize,
    pub b: usize,
    pub order: u8,
}

impl Bond {
    pub fn new(a: usize, b: usize, order: u8) -> Self {
        Bond {
            a: a.min(b),
            b: a.max(b),
            order,
        }
    }

    pub fn other(&self, atom: usize) -> usize {
        if self.a == atom {
            self.b
        } else {
            self.a
        }
    }
}

#[derive(Debug, Clone)]
pub struct MolecularGraph {
    atoms: Vec<Atom>,
    bonds: Vec<Bond>,
    adjacency: Vec<Vec<(usize, usize)>>,
    implicit_h: Vec<u8>,
    rings: Vec<Vec<usize>>,
    ring_bond: Vec<bool>,
    ring_atom: Vec<bool>,
}

impl MolecularGraph {
    /// Builds and validates a graph from kekulized atoms and bonds.
    pub fn new(atoms: Vec<Atom>, bonds: Vec<Bond>) -> Result<Self, MolError> {
        if atoms.is_empty() {
            return Err(MolError::Empty);
        }
        let n = atoms.len();
        let mut adjacency = vec![Vec::new(); n];
        let mut bonds = bonds;
        for bond in &mut bonds {
            *bond = Bond::new(bond.a, bond.b, bond.order);
        }
        for (idx, bond) in bonds.iter().enumerate() {
            if bond.b >= n {
                return Err(MolError::InvalidBond {
                    a: bond.a,
                    b: bond.b,
                    message: "endpoint out of range".into(),
                });
            }
            if bond.a == bond.b {
                return Err(MolError::InvalidBond {
                    a: bond.a,
                    b: bond.b,
                    message: "self loop".into(),
                });
            }
            if !(1..=3).contains(&bond.order) {
                return Err(MolError::InvalidBond {
                    a: bond.a,
                    b: bond.b,
                    message: format!("bond order {}", bond.order),
                });
            }
            if adjacency[bond.a].iter().any(|&(j, _)| j == bond.b) {
                return Err(MolError::InvalidBond {
                    a: bond.a,
                    b: bond.b,
                    message: "duplicate bond".into(),
                });
            }
            adjacency[bond.a].push((bond.b, idx));
            adjacency[bond.b].push((bond.a, idx));
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }

        let mut implicit_h = Vec::with_capacity(n);
        for (i, atom) in atoms.iter().enumerate() {
            if !(-1..=1).contains(&atom.formal_charge) {
                return Err(MolError::UnsupportedCharge {
                    atom: i,
                    charge: atom.formal_charge,
                });
            }
            let used: i32 = adjacency[i]
                .iter()
                .map(|&(_, b)| bonds[b].order as i32)
                .sum();
            let h =
                atom.element.adjusted_valence(atom.formal_charge) - used - atom.explicit_h as i32;
            if h < 0 {
                return Err(MolError::Valence {
                    atom: i,
                    element: atom.element,
                });
            }
            implicit_h.push(h as u8);
        }

        let mut graph = MolecularGraph {
            atoms,
            bonds,
            adjacency,
            implicit_h,
            rings: Vec::new(),
            ring_bond: Vec::new(),
            ring_atom: Vec::new(),
        };
        if !graph.is_connected() {
            return Err(MolError::Disconnected);
        }
        graph.rings = rings::minimum_cycle_basis(&graph);
        graph.ring_bond = vec![false; graph.bonds.len()];
        graph.ring_atom = vec![false; n];
        for ring in &graph.rings {
            for k in 0..ring.len() {
                let (u, v) = (ring[k], ring[(k + 1) % ring.len()]);
                let b = graph.bond_between(u, v).expect("ring edge is a bond");
                graph.ring_bond[b] = true;
                graph.ring_atom[u] = true;
            }
        }
        let aromatic = rings::perceive_aromaticity(&graph);
        for (atom, flag) in graph.atoms.iter_mut().zip(aromatic) {
            atom.aromatic = flag;
        }
        Ok(graph)
    }

    pub fn num_atoms(&self) -> usize {
        self.atoms.len()
    }

    pub fn num_bonds(&self) -> usize {
        self.bonds.len()
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn atom(&self, i: usize) -> &Atom {
        &self.atoms[i]
    }

    pub fn bonds(&self) -> &[Bond] {
        &self.bonds
    }

    pub fn bond(&self, idx: usize) -> &Bond {
        &self.bonds[idx]
    }

    /// `(neighbor, bond index)` pairs, sorted by neighbor.
    pub fn neighbors(&self, i: usize) -> &[(usize, usize)] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn bond_between(&self, i: usize, j: usize) -> Option<usize> {
        self.adjacency[i]
            .iter()
            .find(|&&(n, _)| n == j)
            .map(|&(_, b)| b)
    }

    pub fn bond_order_sum(&self, i: usize) -> u8 {
        self.adjacency[i]
            .iter()
            .map(|&(_, b)| self.bonds[b].order)
            .sum()
    }

    pub fn implicit_h(&self, i: usize) -> u8 {
        self.implicit_h[i]
    }

    pub fn total_h(&self, i: usize) -> u8 {
        self.implicit_h[i] + self.atoms[i].explicit_h
    }

    /// Hydrogens that a new bond to atom `i` could replace.
    pub fn free_valence(&self, i: usize) -> u8 {
        self.total_h(i)
    }

    pub fn total_hydrogens(&self) -> usize {
        (0..self.num_atoms())
            .map(|i| self.total_h(i) as usize)
            .sum()
    }

    pub fn is_ring_bond(&self, bond: usize) -> bool {
        self.ring_bond[bond]
    }

    pub fn is_ring_atom(&self, i: usize) -> bool {
        self.ring_atom[i]
    }

    /// Minimum cycle basis as ordered atom cycles.
    pub fn rings(&self) -> &[Vec<usize>] {
        &self.rings
    }

    /// |E| − |V| + 1 for a connected graph.
    pub fn circuit_rank(&self) -> usize {
        self.bonds.len() + 1 - self.atoms.len()
    }

    /// Hop counts from `source` to every atom.
    pub fn hop_distances(&self, source: usize) -> Vec<usize> {
        let mut dist = vec![usize::MAX; self.num_atoms()];
        let mut queue = VecDeque::new();
        dist[source] = 0;
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            for &(v, _) in &self.adjacency[u] {
                if dist[v] == usize::MAX {
                    dist[v] = dist[u] + 1;
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    fn is_connected(&self) -> bool {
        self.hop_distances(0).iter().all(|&d| d != usize::MAX)
    }

    /// Same molecule with atoms renumbered so that old atom `i` becomes
    /// `perm[i]`.
    pub fn relabeled(&self, perm: &[usize]) -> Result<MolecularGraph, MolError> {
        assert_eq!(perm.len(), self.num_atoms(), "permutation length");
        let mut atoms = vec![Atom::new(Element::C); self.num_atoms()];
        for (i, atom) in self.atoms.iter().enumerate() {
            atoms[perm[i]] = *atom;
        }
        let bonds = self
            .bonds
            .iter()
            .map(|b| Bond::new(perm[b.a], perm[b.b], b.order))
            .collect();
        MolecularGraph::new(atoms, bonds)
    }
}

/// `adjusted valence − Σ bond orders − explicit H` for one atom.
pub fn implicit_hydrogens(g: &MolecularGraph, atom_index: usize) -> Result<u8, MolError> {
    let atom = g.atom(atom_index);
    let h = atom.element.adjusted_valence(atom.formal_charge)
        - g.bond_order_sum(atom_index) as i32
        - atom.explicit_h as i32;
    if h < 0 {
        Err(MolError::Valence {
            atom: atom_index,
            element: atom.element,
        })
    } else {
        Ok(h as u8)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn implicit_hydrogen_examples() {
        let g = parse_smiles("CC[NH3+]").unwrap();
        assert_eq!(g.atom(2).explicit_h, 3);
        assert_eq!(implicit_hydrogens(&g, 2).unwrap(), 0);

        let g = parse_smiles("CCO").unwrap();
        assert_eq!(implicit_hydrogens(&g, 2).unwrap(), 1);

        let g = parse_smiles("C=C").unwrap();
        assert_eq!(implicit_hydrogens(&g, 0).unwrap(), 2);
    }

    #[test]
    fn rejects_bad_construction() {
        let c = Atom::new(Element::C);
        assert_eq!(
            MolecularGraph::new(vec![c, c], vec![]).unwrap_err(),
            MolError::Disconnected
        );
        assert!(matches!(
            MolecularGraph::new(vec![c, c], vec![Bond::new(0, 1, 1), Bond::new(1, 0, 2)]),
            Err(MolError::InvalidBond { .. })
        ));
        let f = Atom::new(Element::F);
        assert!(matches!(
            MolecularGraph::new(vec![f, f, f], vec![Bond::new(0, 1, 1), Bond::new(1, 2, 1)]),
            Err(MolError::Valence { atom: 1, .. })
        ));
        assert!(matches!(
            MolecularGraph::new(vec![c.with_charge(2)], vec![]),
            Err(MolError::UnsupportedCharge { .. })
        ));
        assert_eq!(
            MolecularGraph::new(vec![], vec![]).unwrap_err(),
            MolError::Empty
        );
    }

    #[test]
    fn ring_bookkeeping() {
        let g = parse_smiles("C1CCCCC1CC").unwrap();
        assert_eq!(g.circuit_rank(), 1);
        assert_eq!(g.rings().len(), 1);
        assert_eq!(g.rings()[0].len(), 6);
        assert!(g.is_ring_atom(0));
        assert!(!g.is_ring_atom(7));
        let tail = g.bond_between(6, 7).unwrap();
        assert!(!g.is_ring_bond(tail));
    }

    #[test]
    fn relabel_preserves_counts() {
        let g = parse_smiles("CC(=O)O").unwrap();
        let h = g.relabeled(&[3, 2, 1, 0]).unwrap();
        assert_eq!(h.atom(2).element, Element::C);
        assert_eq!(h.atom(1).element, Element::O);
        assert_eq!(h.total_hydrogens(), g.total_hydrogens());
        assert_eq!(h.bond(h.bond_between(1, 2).unwrap()).order, 2);
    }
}
