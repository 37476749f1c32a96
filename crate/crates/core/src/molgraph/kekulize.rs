//! Converts parsed aromatic bonds into alternating single/double bonds.
//!
//! Every aromatic atom with spare valence must receive exactly one double
//! bond from its aromatic neighbours, so the task is a perfect matching on
//! the subgraph induced by those atoms. Ring systems are small, so an
//! exhaustive augmenting search that always extends the most constrained
//! atom first is both exact and fast.

use super::{Atom, Bond, Element, MolError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(super) enum RawOrder {
    Unspecified,
    Single,
    Double,
    Triple,
    Aromatic,
}

#[derive(Debug, Clone, Copy)]
pub(super) struct ParsedAtom {
    pub element: Element,
    pub charge: i8,
    /// `Some` for bracket atoms.
    pub hcount: Option<u8>,
    pub aromatic: bool,
}

#[derive(Debug, Clone, Copy)]
pub(super) struct ParsedBond {
    pub a: usize,
    pub b: usize,
    pub order: RawOrder,
}

pub(super) fn kekulize(
    atoms: &[ParsedAtom],
    bonds: &[ParsedBond],
) -> Result<(Vec<Atom>, Vec<Bond>), MolError> {
    let n = atoms.len();
    let is_aromatic_bond = |b: &ParsedBond| match b.order {
        RawOrder::Aromatic => true,
        RawOrder::Unspecified => atoms[b.a].aromatic && atoms[b.b].aromatic,
        _ => false,
    };

    let mut fixed = vec![0i32; n];
    let mut aromatic_bonds = vec![0usize; n];
    for b in bonds {
        let w = match b.order {
            RawOrder::Double => 2,
            RawOrder::Triple => 3,
            _ => 1,
        };
        if is_aromatic_bond(b) {
            aromatic_bonds[b.a] += 1;
            aromatic_bonds[b.b] += 1;
        }
        fixed[b.a] += w;
        fixed[b.b] += w;
    }

    let mut needs_double = vec![false; n];
    for (i, atom) in atoms.iter().enumerate() {
        if !atom.aromatic && aromatic_bonds[i] == 0 {
            continue;
        }
        let spare =
            atom.element.adjusted_valence(atom.charge) - fixed[i] - atom.hcount.unwrap_or(0) as i32;
        if spare < 0 {
            return Err(MolError::Valence {
                atom: i,
                element: atom.element,
            });
        }
        if spare >= 1 && atom.aromatic {
            if aromatic_bonds[i] == 0 {
                return Err(MolError::Kekulization { atom: i });
            }
            needs_double[i] = true;
        }
    }

    // candidate edges: aromatic bonds joining two atoms that need a double bond
    let mut adj: Vec<Vec<(usize, usize)>> = vec![Vec::new(); n];
    for (k, b) in bonds.iter().enumerate() {
        if is_aromatic_bond(b) && needs_double[b.a] && needs_double[b.b] {
            adj[b.a].push((b.b, k));
            adj[b.b].push((b.a, k));
        }
    }
    if let Some(atom) = odd_component(&needs_double, &adj) {
        return Err(MolError::Kekulization { atom });
    }
    let mut mate: Vec<Option<(usize, usize)>> = vec![None; n];
    if !search(&needs_double, &adj, &mut mate) {
        let atom = (0..n).find(|&i| needs_double[i]).unwrap_or(0);
        return Err(MolError::Kekulization { atom });
    }

    let mut out_bonds = Vec::with_capacity(bonds.len());
    for (k, b) in bonds.iter().enumerate() {
        let order = match b.order {
            RawOrder::Double => 2,
            RawOrder::Triple => 3,
            _ if is_aromatic_bond(b) && mate[b.a].map(|(_, bond)| bond) == Some(k) => 2,
            _ => 1,
        };
        out_bonds.push(Bond::new(b.a, b.b, order));
    }
    let out_atoms = atoms
        .iter()
        .map(|a| Atom {
            element: a.element,
            formal_charge: a.charge,
            explicit_h: a.hcount.unwrap_or(0),
            aromatic: a.aromatic,
        })
        .collect();
    Ok((out_atoms, out_bonds))
}

/// First atom of a connected component with an odd number of atoms; such a
/// component has no perfect matching.
fn odd_component(needs: &[bool], adj: &[Vec<(usize, usize)>]) -> Option<usize> {
    let mut seen = vec![false; needs.len()];
    for start in 0..needs.len() {
        if !needs[start] || seen[start] {
            continue;
        }
        let mut stack = vec![start];
        seen[start] = true;
        let mut size = 0;
        while let Some(u) = stack.pop() {
            size += 1;
            for &(v, _) in &adj[u] {
                if !seen[v] {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        if size % 2 == 1 {
            return Some(start);
        }
    }
    None
}

fn search(
    needs: &[bool],
    adj: &[Vec<(usize, usize)>],
    mate: &mut [Option<(usize, usize)>],
) -> bool {
    // most constrained unmatched atom first
    let mut best: Option<(usize, usize)> = None;
    for i in 0..needs.len() {
        if !needs[i] || mate[i].is_some() {
            continue;
        }
        let free = adj[i].iter().filter(|(j, _)| mate[*j].is_none()).count();
        if free == 0 {
            return false;
        }
        if best.is_none_or(|(_, f)| free < f) {
            best = Some((i, free));
        }
    }
    let Some((i, _)) = best else {
        return true;
    };
    for &(j, bond) in &adj[i] {
        if mate[j].is_some() {
            continue;
        }
        mate[i] = Some((j, bond));
        mate[j] = Some((i, bond));
        if search(needs, adj, mate) {
            return true;
        }
        mate[i] = None;
        mate[j] = None;
    }
    false
}
