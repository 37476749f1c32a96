//! Scalar molecular properties: an atom-additive logP estimate, a ring and
//! branching based synthetic-accessibility proxy, penalized logP and
//! molecular weight.
//!
//! Neither the logP table nor the SA proxy tries to match any published
//! implementation, so absolute values are only comparable with each other.

use std::collections::HashMap;
use std::sync::OnceLock;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::{Element, MolecularGraph, HYDROGEN_MASS};

const BUNDLED_TABLE: &str = include_str!("../data/logp_contributions.csv");

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ChemError {
    #[error("atom {atom} has class '{class}', which is missing from the logP table")]
    UnclassifiedAtom { atom: usize, class: String },
    #[error("logP table line {line}: {message}")]
    Table { line: usize, message: String },
}

/// Class key → contribution, loaded from `class,contribution` CSV lines.
#[derive(Debug, Clone, PartialEq)]
pub struct LogpTable {
    entries: HashMap<String, f64>,
}

impl LogpTable {
    pub fn parse(text: &str) -> Result<Self, ChemError> {
        let mut entries = HashMap::new();
        let mut seen_header = false;
        for (idx, raw) in text.lines().enumerate() {
            let line = raw.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            if !seen_header {
                seen_header = true;
                if line == "class,contribution" {
                    continue;
                }
            }
            let err = |message: String| ChemError::Table {
                line: idx + 1,
                message,
            };
            let (key, value) = line
                .split_once(',')
                .ok_or_else(|| err("expected two columns".into()))?;
            let value: f64 = value
                .trim()
                .parse()
                .map_err(|e| err(format!("bad contribution: {e}")))?;
            if entries.insert(key.trim().to_string(), value).is_some() {
                return Err(err(format!("duplicate class '{key}'")));
            }
        }
        Ok(LogpTable { entries })
    }

    /// The table shipped in `data/logp_contributions.csv`.
    pub fn bundled() -> &'static LogpTable {
        static TABLE: OnceLock<LogpTable> = OnceLock::new();
        TABLE.get_or_init(|| {
            LogpTable::parse(BUNDLED_TABLE).expect("bundled logP table is well formed")
        })
    }

    pub fn get(&self, class: &str) -> Option<f64> {
        self.entries.get(class).copied()
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }
}

/// Table key of a heavy atom, e.g. `C.aro.1`.
pub fn atom_class(g: &MolecularGraph, i: usize) -> String {
    let atom = g.atom(i);
    let hetero = g
        .neighbors(i)
        .iter()
        .filter(|&&(j, _)| g.atom(j).element != Element::C)
        .count()
        .min(3);
    let context = if atom.aromatic { "aro" } else { "ali" };
    format!("{}.{}.{}", atom.element.symbol(), context, hetero)
}

/// Table key of a hydrogen attached to `element`.
pub fn hydrogen_class(element: Element) -> &'static str {
    match element {
        Element::C => "H.C",
        Element::N => "H.N",
        Element::O => "H.O",
        Element::S => "H.S",
        Element::P => "H.P",
        Element::B => "H.B",
        Element::F | Element::Cl | Element::Br | Element::I => "H.X",
    }
}

pub fn logp_with_table(g: &MolecularGraph, table: &LogpTable) -> Result<f64, ChemError> {
    let lookup = |atom: usize, class: &str| {
        table.get(class).ok_or_else(|| ChemError::UnclassifiedAtom {
            atom,
            class: class.to_string(),
        })
    };
    let mut total = 0.0;
    for i in 0..g.num_atoms() {
        let atom = g.atom(i);
        total += lookup(i, &atom_class(g, i))?;
        let h = g.total_h(i);
        if h > 0 {
            total += h as f64 * lookup(i, hydrogen_class(atom.element))?;
        }
        match atom.formal_charge.signum() {
            1 => total += lookup(i, "charge.pos")?,
            -1 => total += lookup(i, "charge.neg")?,
            _ => {}
        }
    }
    Ok(total)
}

pub fn logp_estimate(g: &MolecularGraph) -> Result<f64, ChemError> {
    logp_with_table(g, LogpTable::bundled())
}

/// 0.05 per heavy atom, 0.5 per independent cycle, 0.25 per atom with four
/// or more heavy neighbours, and 1.0 per basis ring smaller than 5 or
/// larger than 7.
pub fn sa_proxy(g: &MolecularGraph) -> f64 {
    let heavy = g.num_atoms() as f64;
    let branched = (0..g.num_atoms()).filter(|&i| g.degree(i) >= 4).count() as f64;
    let strained = g
        .rings()
        .iter()
        .filter(|r| r.len() < 5 || r.len() > 7)
        .count() as f64;
    0.05 * heavy + 0.5 * g.circuit_rank() as f64 + 0.25 * branched + strained
}

pub fn penalized_logp(g: &MolecularGraph) -> Result<f64, ChemError> {
    Ok(logp_estimate(g)? - sa_proxy(g))
}

pub fn mol_weight(g: &MolecularGraph) -> f64 {
    let heavy: f64 = g.atoms().iter().map(|a| a.element.atomic_mass()).sum();
    heavy + g.total_hydrogens() as f64 * HYDROGEN_MASS
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PropertyReport {
    pub logp: f64,
    pub sa: f64,
    pub penalized_logp: f64,
    pub mol_weight: f64,
}

pub fn properties(g: &MolecularGraph) -> Result<PropertyReport, ChemError> {
    let logp = logp_estimate(g)?;
    let sa = sa_proxy(g);
    Ok(PropertyReport {
        logp,
        sa,
        penalized_logp: logp - sa,
        mol_weight: mol_weight(g),
    })
}
