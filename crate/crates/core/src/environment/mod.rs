//! The molecule-editing MDP: states, chemically valid actions and
//! deterministic transitions.
//!
//! Every action is checked against the valence model before it is offered,
//! and applying it rebuilds the graph through `MolecularGraph::new`, so a
//! state can never hold an invalid or disconnected molecule.

mod features;
mod trajectory;

use std::collections::BTreeSet;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::{Atom, Bond, Element, MolError, MolecularGraph};

pub use features::{
    featurize, molecule_features, state_vector_hash, FeatureConfig, FeatureError, Featurizer,
    MoleculeFeatures, SparseVector, StateVector, SPARSE_EPSILON,
};
pub use trajectory::{read_trajectory, write_trajectory, TrajectoryRecord};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnvError {
    #[error("invalid action {action}: {reason}")]
    InvalidAction { action: MolAction, reason: String },
    #[error("invalid environment configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct EnvConfig {
    pub allowed_elements: Vec<Element>,
    pub max_steps: usize,
    pub allow_no_op: bool,
    /// Ring sizes a new bond between unbonded atoms may close.
    pub allowed_ring_sizes: Vec<usize>,
    pub features: FeatureConfig,
}

impl Default for EnvConfig {
    fn default() -> Self {
        EnvConfig {
            allowed_elements: vec![Element::C, Element::N, Element::O],
            max_steps: 20,
            allow_no_op: true,
            allowed_ring_sizes: vec![3, 4, 5, 6, 7],
            features: FeatureConfig::default(),
        }
    }
}

impl EnvConfig {
    pub fn validate(&self) -> Result<(), EnvError> {
        if self.max_steps == 0 {
            return Err(EnvError::Config("max_steps must be at least 1".into()));
        }
        if let Some(bad) = self
            .allowed_elements
            .iter()
            .find(|e| !matches!(e, Element::C | Element::N | Element::O))
        {
            return Err(EnvError::Config(format!(
                "atom additions support C, N and O, not {bad:?}"
            )));
        }
        if let Some(&bad) = self
            .allowed_ring_sizes
            .iter()
            .find(|s| !(3..=8).contains(*s))
        {
            return Err(EnvError::Config(format!("ring size {bad} outside 3..=8")));
        }
        self.features
            .validate()
            .map_err(|e| EnvError::Config(e.to_string()))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(tag = "kind")]
pub enum MolAction {
    AtomAddition {
        attach_atom: usize,
        element: Element,
        bond_order: u8,
    },
    /// Raises the order of an existing bond by one, or creates a single bond
    /// that closes a ring.
    BondAddition {
        atom_i: usize,
        atom_j: usize,
    },
    /// Lowers the order of a bond by one, deleting it when it was single.
    BondRemoval {
        atom_i: usize,
        atom_j: usize,
    },
    NoOp,
}

impl fmt::Display for MolAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            MolAction::AtomAddition {
                attach_atom,
                element,
                bond_order,
            } => write!(
                f,
                "add {element:?} to atom {attach_atom} (order {bond_order})"
            ),
            MolAction::BondAddition { atom_i, atom_j } => write!(f, "add bond {atom_i}-{atom_j}"),
            MolAction::BondRemoval { atom_i, atom_j } => write!(f, "remove bond {atom_i}-{atom_j}"),
            MolAction::NoOp => f.write_str("no-op"),
        }
    }
}

#[derive(Debug, Clone)]
pub struct EnvState {
    pub molecule: Arc<MolecularGraph>,
    pub steps_remaining: usize,
    pub origin: Arc<MolecularGraph>,
}

impl EnvState {
    pub fn start(molecule: MolecularGraph, cfg: &EnvConfig) -> Self {
        let molecule = Arc::new(molecule);
        EnvState {
            origin: Arc::clone(&molecule),
            molecule,
            steps_remaining: cfg.max_steps,
        }
    }
}

pub fn is_terminal(s: &EnvState) -> bool {
    s.steps_remaining == 0
}

pub fn valid_actions(s: &EnvState, cfg: &EnvConfig) -> Vec<MolAction> {
    let g = &*s.molecule;
    let n = g.num_atoms();
    let mut actions = BTreeSet::new();

    for i in 0..n {
        let free = g.free_valence(i);
        for &element in &cfg.allowed_elements {
            let cap = free.min(element.default_valence()).min(3);
            for bond_order in 1..=cap {
                actions.insert(MolAction::AtomAddition {
                    attach_atom: i,
                    element,
                    bond_order,
                });
            }
        }
    }

    let open: Vec<usize> = (0..n).filter(|&i| g.free_valence(i) > 0).collect();
    for (k, &i) in open.iter().enumerate() {
        let hops = if cfg.allowed_ring_sizes.is_empty() {
            Vec::new()
        } else {
            g.hop_distances(i)
        };
        for &j in &open[k + 1..] {
            let ok = match g.bond_between(i, j) {
                Some(b) => g.bond(b).order < 3,
                None => cfg.allowed_ring_sizes.contains(&(hops[j] + 1)),
            };
            if ok {
                actions.insert(MolAction::BondAddition {
                    atom_i: i,
                    atom_j: j,
                });
            }
        }
    }

    for (idx, bond) in g.bonds().iter().enumerate() {
        if bond.order > 1 || g.is_ring_bond(idx) {
            actions.insert(MolAction::BondRemoval {
                atom_i: bond.a,
                atom_j: bond.b,
            });
        }
    }

    if cfg.allow_no_op {
        actions.insert(MolAction::NoOp);
    }
    actions.into_iter().collect()
}

/// Takes `delta` hydrogens off atom `i`, implicit ones first.
fn consume_hydrogens(
    g: &MolecularGraph,
    atoms: &mut [Atom],
    i: usize,
    delta: u8,
) -> Result<(), String> {
    if g.free_valence(i) < delta {
        return Err(format!("atom {i} has free valence {}", g.free_valence(i)));
    }
    let implicit = g.implicit_h(i);
    if delta > implicit {
        atoms[i].explicit_h -= delta - implicit;
    }
    Ok(())
}

fn edit(g: &MolecularGraph, a: MolAction) -> Result<MolecularGraph, String> {
    let n = g.num_atoms();
    let mut atoms: Vec<Atom> = g.atoms().to_vec();
    let mut bonds: Vec<Bond> = g.bonds().to_vec();
    match a {
        MolAction::NoOp => return Ok(g.clone()),
        MolAction::AtomAddition {
            attach_atom,
            element,
            bond_order,
        } => {
            if attach_atom >= n {
                return Err("attach atom out of range".into());
            }
            if !(1..=3).contains(&bond_order) {
                return Err(format!("bond order {bond_order}"));
            }
            consume_hydrogens(g, &mut atoms, attach_atom, bond_order)?;
            atoms.push(Atom::new(element));
            bonds.push(Bond::new(attach_atom, n, bond_order));
        }
        MolAction::BondAddition { atom_i, atom_j } => {
            if atom_i >= n || atom_j >= n || atom_i == atom_j {
                return Err("bad atom pair".into());
            }
            consume_hydrogens(g, &mut atoms, atom_i, 1)?;
            consume_hydrogens(g, &mut atoms, atom_j, 1)?;
            match g.bond_between(atom_i, atom_j) {
                Some(b) => bonds[b].order += 1,
                None => bonds.push(Bond::new(atom_i, atom_j, 1)),
            }
        }
        MolAction::BondRemoval { atom_i, atom_j } => {
            if atom_i >= n || atom_j >= n {
                return Err("bad atom pair".into());
            }
            let b = g
                .bond_between(atom_i, atom_j)
                .ok_or("atoms are not bonded")?;
            if bonds[b].order > 1 {
                bonds[b].order -= 1;
            } else {
                bonds.remove(b);
            }
        }
    }
    // Kekulé orders are rebuilt from scratch, so stale aromatic flags on the
    // copied atoms are harmless: `new` re-perceives them.
    MolecularGraph::new(atoms, bonds).map_err(|e: MolError| e.to_string())
}

/// Successor state. The source state is left untouched.
pub fn apply_action(s: &EnvState, a: MolAction) -> Result<EnvState, EnvError> {
    let invalid = |reason: String| EnvError::InvalidAction { action: a, reason };
    if is_terminal(s) {
        return Err(invalid("episode has no steps remaining".into()));
    }
    let molecule = match a {
        MolAction::NoOp => Arc::clone(&s.molecule),
        _ => Arc::new(edit(&s.molecule, a).map_err(invalid)?),
    };
    Ok(EnvState {
        molecule,
        steps_remaining: s.steps_remaining - 1,
        origin: Arc::clone(&s.origin),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::molgraph::{parse_smiles, write_smiles};

    fn state(s: &str) -> EnvState {
        EnvState::start(parse_smiles(s).unwrap(), &EnvConfig::default())
    }

    fn smiles(s: &EnvState) -> String {
        write_smiles(&s.molecule)
    }

    #[test]
    fn methane_actions() {
        let acts = valid_actions(&state("C"), &EnvConfig::default());
        let additions = acts
            .iter()
            .filter(|a| matches!(a, MolAction::AtomAddition { .. }))
            .count();
        // O can take at most a double bond
        assert_eq!(additions, 8);
        assert_eq!(acts.len(), 9);
        assert_eq!(*acts.last().unwrap(), MolAction::NoOp);
    }

    #[test]
    fn ethane_actions() {
        let acts = valid_actions(&state("CC"), &EnvConfig::default());
        assert!(acts.contains(&MolAction::BondAddition {
            atom_i: 0,
            atom_j: 1
        }));
        assert!(!acts
            .iter()
            .any(|a| matches!(a, MolAction::BondRemoval { .. })));
    }

    #[test]
    fn cyclopropane_ring_bonds_removable() {
        let acts = valid_actions(&state("C1CC1"), &EnvConfig::default());
        let removals = acts
            .iter()
            .filter(|a| matches!(a, MolAction::BondRemoval { .. }))
            .count();
        assert_eq!(removals, 3);
    }

    #[test]
    fn ring_size_gate() {
        let cfg = EnvConfig {
            allowed_ring_sizes: vec![6],
            ..EnvConfig::default()
        };
        let s = EnvState::start(parse_smiles("CCCCCC").unwrap(), &cfg);
        let closures: Vec<_> = valid_actions(&s, &cfg)
            .into_iter()
            .filter(|a| matches!(a, MolAction::BondAddition { .. }))
            .collect();
        // five order upgrades plus the 0-5 closure
        assert_eq!(closures.len(), 6);
        assert!(closures.contains(&MolAction::BondAddition {
            atom_i: 0,
            atom_j: 5
        }));
    }

    #[test]
    fn transitions() {
        let s = state("C");
        let t = apply_action(
            &s,
            MolAction::AtomAddition {
                attach_atom: 0,
                element: Element::C,
                bond_order: 1,
            },
        )
        .unwrap();
        assert_eq!(smiles(&t), "CC");
        assert_eq!(t.steps_remaining, s.steps_remaining - 1);
        assert_eq!(smiles(&s), "C");
        let u = apply_action(&t, MolAction::NoOp).unwrap();
        assert_eq!(smiles(&u), "CC");
        assert_eq!(write_smiles(&u.origin), "C");
    }

    #[test]
    fn charged_atom_gives_up_explicit_hydrogen() {
        let s = state("C[NH3+]");
        let t = apply_action(
            &s,
            MolAction::AtomAddition {
                attach_atom: 1,
                element: Element::C,
                bond_order: 1,
            },
        )
        .unwrap();
        assert_eq!(t.molecule.total_h(1), 2);
        assert_eq!(t.molecule.atom(1).formal_charge, 1);
    }

    #[test]
    fn invalid_actions_rejected() {
        let s = state("CC");
        let removal = MolAction::BondRemoval {
            atom_i: 0,
            atom_j: 1,
        };
        assert!(matches!(
            apply_action(&s, removal),
            Err(EnvError::InvalidAction { .. })
        ));
        let mut done = s.clone();
        done.steps_remaining = 0;
        assert!(is_terminal(&done));
        assert!(apply_action(&done, MolAction::NoOp).is_err());
    }

    #[test]
    fn every_offered_action_applies() {
        for smi in [
            "c1ccccc1O",
            "C[NH3+]",
            "CC(=O)[O-]",
            "C1CCC1C#N",
            "OB(O)c1ccccc1",
        ] {
            let s = state(smi);
            for a in valid_actions(&s, &EnvConfig::default()) {
                apply_action(&s, a).unwrap_or_else(|e| panic!("{smi}: {e}"));
            }
        }
    }

    #[test]
    fn config_validation() {
        assert!(EnvConfig::default().validate().is_ok());
        let cfg = EnvConfig {
            max_steps: 0,
            ..EnvConfig::default()
        };
        assert!(cfg.validate().is_err());
        let cfg = EnvConfig {
            allowed_ring_sizes: vec![9],
            ..EnvConfig::default()
        };
        assert!(cfg.validate().is_err());
    }
}
