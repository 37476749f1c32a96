//! Canonical SMILES output.
//!
//! Atoms are ranked by iterative refinement: a seed invariant of
//! (element, degree, charge, hydrogen count), then repeated re-ranking on
//! (own rank, sorted (bond order, neighbour rank) list) until the partition
//! is stable. Remaining ties are split one at a time at the lowest input
//! index and refined again. The SMILES string is a depth-first walk from the
//! lowest-ranked atom, visiting neighbours in rank order.

use std::fmt::Write as _;

use super::MolecularGraph;

fn dense_ranks<K: Ord + Clone>(keys: &[K]) -> Vec<usize> {
    let mut sorted: Vec<K> = keys.to_vec();
    sorted.sort();
    sorted.dedup();
    keys.iter()
        .map(|k| sorted.binary_search(k).expect("key present"))
        .collect()
}

fn class_count(ranks: &[usize]) -> usize {
    ranks.iter().max().map_or(0, |m| m + 1)
}

fn refine(g: &MolecularGraph, mut ranks: Vec<usize>) -> Vec<usize> {
    loop {
        let keys: Vec<(usize, Vec<(u8, usize)>)> = (0..g.num_atoms())
            .map(|i| {
                let mut nb: Vec<(u8, usize)> = g
                    .neighbors(i)
                    .iter()
                    .map(|&(j, b)| (g.bond(b).order, ranks[j]))
                    .collect();
                nb.sort_unstable();
                (ranks[i], nb)
            })
            .collect();
        let next = dense_ranks(&keys);
        if class_count(&next) == class_count(&ranks) {
            return next;
        }
        ranks = next;
    }
}

/// Canonical atom ranks, a permutation of `0..n`.
pub fn canonical_ranks(g: &MolecularGraph) -> Vec<usize> {
    let seeds: Vec<(usize, usize, i8, u8)> = (0..g.num_atoms())
        .map(|i| {
            let a = g.atom(i);
            (
                a.element as usize,
                g.degree(i),
                a.formal_charge,
                g.total_h(i),
            )
        })
        .collect();
    let mut ranks = refine(g, dense_ranks(&seeds));
    while class_count(&ranks) < g.num_atoms() {
        let mut counts = vec![0usize; g.num_atoms()];
        for &r in &ranks {
            counts[r] += 1;
        }
        let tied = (0..counts.len())
            .find(|&r| counts[r] > 1)
            .expect("a tied class exists");
        let pick = (0..g.num_atoms())
            .find(|&i| ranks[i] == tied)
            .expect("class member");
        let keys: Vec<(usize, bool)> = (0..g.num_atoms()).map(|i| (ranks[i], i != pick)).collect();
        ranks = refine(g, dense_ranks(&keys));
    }
    ranks
}

fn atom_token(g: &MolecularGraph, i: usize, out: &mut String) {
    let atom = g.atom(i);
    if atom.formal_charge == 0 {
        out.push_str(atom.element.symbol());
        return;
    }
    out.push('[');
    out.push_str(atom.element.symbol());
    match g.total_h(i) {
        0 => {}
        1 => out.push('H'),
        h => {
            let _ = write!(out, "H{h}");
        }
    }
    out.push(if atom.formal_charge > 0 { '+' } else { '-' });
    out.push(']');
}

fn bond_symbol(order: u8) -> &'static str {
    match order {
        2 => "=",
        3 => "#",
        _ => "",
    }
}

struct Walk<'a> {
    g: &'a MolecularGraph,
    ranks: Vec<usize>,
    visited: Vec<bool>,
    parent_bond: Vec<Option<usize>>,
    children: Vec<Vec<(usize, usize)>>,
    // per atom: (bond, is_opening)
    ring_bonds: Vec<Vec<(usize, bool)>>,
    tree_bond: Vec<bool>,
}

impl Walk<'_> {
    fn discover(&mut self, v: usize) {
        self.visited[v] = true;
        let mut nbrs: Vec<(usize, usize)> = self.g.neighbors(v).to_vec();
        nbrs.sort_by_key(|&(j, _)| self.ranks[j]);
        for (w, b) in nbrs {
            if self.parent_bond[v] == Some(b) {
                continue;
            }
            if !self.visited[w] {
                self.tree_bond[b] = true;
                self.parent_bond[w] = Some(b);
                self.children[v].push((w, b));
                self.discover(w);
            } else if !self.tree_bond[b] && !self.ring_bonds[v].iter().any(|&(rb, _)| rb == b) {
                // w is an ancestor still on the stack: v closes, w opens
                self.ring_bonds[w].push((b, true));
                self.ring_bonds[v].push((b, false));
            }
        }
    }

    fn emit(
        &self,
        v: usize,
        digits: &mut Vec<Option<usize>>,
        open: &mut Vec<Option<usize>>,
        out: &mut String,
    ) {
        atom_token(self.g, v, out);
        // closings first so their digits can be reused by openings here
        let mut closes: Vec<usize> = self.ring_bonds[v]
            .iter()
            .filter(|r| !r.1)
            .map(|r| r.0)
            .collect();
        let mut opens: Vec<usize> = self.ring_bonds[v]
            .iter()
            .filter(|r| r.1)
            .map(|r| r.0)
            .collect();
        closes.sort_by_key(|&b| open[b]);
        opens.sort_by_key(|&b| self.ranks[self.g.bond(b).other(v)]);
        for b in closes {
            let d = open[b].take().expect("ring bond was opened");
            push_digit(d, out);
            digits[d] = None;
        }
        for b in opens {
            let d = (1..)
                .find(|&d| digits.get(d).is_none_or(|s| s.is_none()))
                .expect("free digit");
            if digits.len() <= d {
                digits.resize(d + 1, None);
            }
            digits[d] = Some(b);
            open[b] = Some(d);
            out.push_str(bond_symbol(self.g.bond(b).order));
            push_digit(d, out);
        }
        let kids = &self.children[v];
        for (k, &(w, b)) in kids.iter().enumerate() {
            let last = k + 1 == kids.len();
            if !last {
                out.push('(');
            }
            out.push_str(bond_symbol(self.g.bond(b).order));
            self.emit(w, digits, open, out);
            if !last {
                out.push(')');
            }
        }
    }
}

fn push_digit(d: usize, out: &mut String) {
    if d < 10 {
        let _ = write!(out, "{d}");
    } else {
        let _ = write!(out, "%{d:02}");
    }
}

/// Deterministic kekulé SMILES; equal for any atom ordering of the same
/// molecule.
pub fn write_smiles(g: &MolecularGraph) -> String {
    let ranks = canonical_ranks(g);
    let n = g.num_atoms();
    let start = (0..n).min_by_key(|&i| ranks[i]).expect("non-empty graph");
    let mut walk = Walk {
        g,
        ranks,
        visited: vec![false; n],
        parent_bond: vec![None; n],
        children: vec![Vec::new(); n],
        ring_bonds: vec![Vec::new(); n],
        tree_bond: vec![false; g.num_bonds()],
    };
    walk.discover(start);
    let mut out = String::new();
    let mut digits: Vec<Option<usize>> = Vec::new();
    let mut open: Vec<Option<usize>> = vec![None; g.num_bonds()];
    walk.emit(start, &mut digits, &mut open, &mut out);
    out
}
