//! Chemical validity checked from first principles: every bond order is
//! 1 to 3, every atom's bonds plus hydrogens match one of its allowed
//! valences, and the graph is a single component.

use graphtrl::molgraph::Element;
use graphtrl::MolecularGraph;
use petgraph::algo::connected_components;
use petgraph::graph::UnGraph;

fn allowed_valences(e: Element) -> &'static [i32] {
    match e {
        Element::B => &[3],
        Element::C => &[4],
        Element::N => &[3],
        Element::O => &[2],
        Element::P => &[3, 5],
        Element::S => &[2, 4, 6],
        Element::F | Element::Cl | Element::Br | Element::I => &[1],
    }
}

fn charge_shift(e: Element, q: i32) -> i32 {
    match e {
        Element::N | Element::P | Element::O | Element::S => q,
        Element::B => -q,
        _ => -q.abs(),
    }
}

pub fn check_valid(g: &MolecularGraph) -> Result<(), String> {
    if g.num_atoms() == 0 {
        return Err("empty".into());
    }
    let mut used = vec![0i32; g.num_atoms()];
    let mut pg = UnGraph::<(), ()>::new_undirected();
    let nodes: Vec<_> = (0..g.num_atoms()).map(|_| pg.add_node(())).collect();
    for b in g.bonds() {
        if !(1..=3).contains(&b.order) || b.a == b.b {
            return Err(format!("bad bond {}-{} order {}", b.a, b.b, b.order));
        }
        used[b.a] += b.order as i32;
        used[b.b] += b.order as i32;
        pg.add_edge(nodes[b.a], nodes[b.b], ());
    }
    for (i, a) in g.atoms().iter().enumerate() {
        let total = used[i] + g.total_h(i) as i32;
        let shift = charge_shift(a.element, a.formal_charge as i32);
        if !allowed_valences(a.element)
            .iter()
            .any(|v| v + shift == total)
        {
            return Err(format!(
                "atom {i} {:?} charge {} has valence {total}",
                a.element, a.formal_charge
            ));
        }
    }
    if connected_components(&pg) != 1 {
        return Err("disconnected".into());
    }
    Ok(())
}
