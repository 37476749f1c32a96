//! SYBYL (Tripos mol2) atom typing for the supported elements.

use std::fmt;

use super::{Element, MolecularGraph};

/// Tripos atom types reachable from the supported elements, in feature
/// layout order. Boron has no Tripos code and is typed by its symbol, like
/// the halogens.
pub const SYBYL_TYPES: [&str; 23] = [
    "C.1", "C.2", "C.3", "C.ar", "C.cat", "N.1", "N.2", "N.3", "N.4", "N.am", "N.ar", "N.pl3",
    "O.2", "O.3", "O.co2", "S.2", "S.3", "P.3", "F", "Cl", "Br", "I", "B",
];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct SybylType(&'static str);

impl SybylType {
    fn of(code: &'static str) -> Self {
        debug_assert!(SYBYL_TYPES.contains(&code), "{code} not in table");
        SybylType(code)
    }

    pub fn code(&self) -> &'static str {
        self.0
    }
}

impl fmt::Display for SybylType {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.0)
    }
}

fn bond_orders(g: &MolecularGraph, i: usize) -> impl Iterator<Item = (usize, u8)> + '_ {
    g.neighbors(i)
        .iter()
        .map(move |&(j, b)| (j, g.bond(b).order))
}

fn has_order(g: &MolecularGraph, i: usize, order: u8) -> bool {
    bond_orders(g, i).any(|(_, o)| o == order)
}

fn count_order(g: &MolecularGraph, i: usize, order: u8) -> usize {
    bond_orders(g, i).filter(|&(_, o)| o == order).count()
}

/// Carbon double bonded to O or S.
fn is_carbonyl_like(g: &MolecularGraph, c: usize) -> bool {
    g.atom(c).element == Element::C
        && bond_orders(g, c)
            .any(|(j, o)| o == 2 && matches!(g.atom(j).element, Element::O | Element::S))
}

fn terminal_oxygens(g: &MolecularGraph, center: usize) -> Vec<usize> {
    g.neighbors(center)
        .iter()
        .map(|&(j, _)| j)
        .filter(|&j| g.atom(j).element == Element::O && g.degree(j) == 1)
        .collect()
}

pub fn sybyl_type(g: &MolecularGraph, i: usize) -> SybylType {
    let atom = g.atom(i);
    let code = match atom.element {
        Element::C => {
            let n_neighbors = bond_orders(g, i)
                .filter(|&(j, _)| g.atom(j).element == Element::N)
                .count();
            let double_to_cation = bond_orders(g, i).any(|(j, o)| {
                o == 2 && g.atom(j).element == Element::N && g.atom(j).formal_charge == 1
            });
            if has_order(g, i, 3) || count_order(g, i, 2) >= 2 {
                "C.1"
            } else if atom.aromatic {
                "C.ar"
            } else if double_to_cation && n_neighbors >= 2 {
                "C.cat"
            } else if has_order(g, i, 2) {
                "C.2"
            } else {
                "C.3"
            }
        }
        Element::N => {
            let multiple = has_order(g, i, 2) || has_order(g, i, 3);
            if atom.formal_charge == 1 && !multiple && !atom.aromatic {
                "N.4"
            } else if atom.aromatic {
                "N.ar"
            } else if has_order(g, i, 3) || count_order(g, i, 2) >= 2 {
                "N.1"
            } else if has_order(g, i, 2) {
                if atom.formal_charge == 1 && g.degree(i) == 3 {
                    "N.pl3"
                } else {
                    "N.2"
                }
            } else if bond_orders(g, i).any(|(j, _)| is_carbonyl_like(g, j)) {
                "N.am"
            } else if bond_orders(g, i)
                .any(|(j, _)| g.atom(j).aromatic || has_order(g, j, 2) || has_order(g, j, 3))
            {
                "N.pl3"
            } else {
                "N.3"
            }
        }
        Element::O => {
            let carboxylate_like = g.degree(i) == 1 && {
                let center = g.neighbors(i)[0].0;
                let term = terminal_oxygens(g, center);
                match g.atom(center).element {
                    Element::C => {
                        term.len() >= 2 && term.iter().any(|&o| g.atom(o).formal_charge == -1)
                    }
                    Element::P => term.len() >= 2,
                    _ => false,
                }
            };
            if carboxylate_like {
                "O.co2"
            } else if has_order(g, i, 2) {
                "O.2"
            } else {
                "O.3"
            }
        }
        Element::S => {
            if has_order(g, i, 2) || atom.aromatic {
                "S.2"
            } else {
                "S.3"
            }
        }
        Element::P => "P.3",
        Element::F => "F",
        Element::Cl => "Cl",
        Element::Br => "Br",
        Element::I => "I",
        Element::B => "B",
    };
    SybylType::of(code)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::parse_smiles;

    fn ty(smiles: &str, atom: usize) -> &'static str {
        sybyl_type(&parse_smiles(smiles).unwrap(), atom).code()
    }

    #[test]
    fn carbon_hybridization() {
        assert_eq!(ty("C#C", 0), "C.1");
        assert_eq!(ty("C=C", 0), "C.2");
        assert_eq!(ty("CC", 0), "C.3");
        assert_eq!(ty("c1ccccc1", 0), "C.ar");
        assert_eq!(ty("C=C=C", 1), "C.1");
        assert_eq!(ty("NC(N)=[NH2+]", 1), "C.cat");
    }

    #[test]
    fn heteroatoms() {
        assert_eq!(ty("CCO", 2), "O.3");
        assert_eq!(ty("CC=O", 2), "O.2");
        assert_eq!(ty("CC(=O)[O-]", 2), "O.co2");
        assert_eq!(ty("CC(=O)[O-]", 3), "O.co2");
        assert_eq!(ty("CC(=O)O", 3), "O.3");
        assert_eq!(ty("CC[NH3+]", 2), "N.4");
        assert_eq!(ty("CC#N", 2), "N.1");
        assert_eq!(ty("CC=NC", 2), "N.2");
        assert_eq!(ty("CC(=O)NC", 3), "N.am");
        assert_eq!(ty("Nc1ccccc1", 0), "N.pl3");
        assert_eq!(ty("C[N+](=O)[O-]", 1), "N.pl3");
        assert_eq!(ty("CCN", 2), "N.3");
        assert_eq!(ty("c1ccncc1", 3), "N.ar");
        assert_eq!(ty("CSC", 1), "S.3");
        assert_eq!(ty("c1ccsc1", 3), "S.2");
        assert_eq!(ty("CCCl", 2), "Cl");
    }

    #[test]
    fn every_type_is_in_table() {
        for s in ["CP(C)C", "CB(C)C", "FC(Cl)(Br)I", "C=S"] {
            let g = parse_smiles(s).unwrap();
            for i in 0..g.num_atoms() {
                assert!(SYBYL_TYPES.contains(&sybyl_type(&g, i).code()));
            }
        }
    }
}
