//! Labelled graph isomorphism through petgraph's VF2.

use graphtrl::molgraph::{Element, MolecularGraph};
use petgraph::algo::is_isomorphic_matching;
use petgraph::graph::UnGraph;

type Label = (Element, i8, u8);

fn to_petgraph(g: &MolecularGraph) -> UnGraph<Label, u8> {
    let mut pg = UnGraph::new_undirected();
    let nodes: Vec<_> = (0..g.num_atoms())
        .map(|i| {
            let a = g.atom(i);
            pg.add_node((a.element, a.formal_charge, g.total_h(i)))
        })
        .collect();
    for b in g.bonds() {
        pg.add_edge(nodes[b.a], nodes[b.b], b.order);
    }
    pg
}

/// Same elements, charges, hydrogen counts and bond orders up to relabeling.
pub fn isomorphic(a: &MolecularGraph, b: &MolecularGraph) -> bool {
    if a.num_atoms() != b.num_atoms() || a.num_bonds() != b.num_bonds() {
        return false;
    }
    is_isomorphic_matching(
        &to_petgraph(a),
        &to_petgraph(b),
        |x, y| x == y,
        |x, y| x == y,
    )
}
