//! Random molecules reached from the bundled sample by valid edits.

use graphtrl::environment::{apply_action, valid_actions, EnvConfig, EnvState};
use graphtrl::sample::sample_molecules;
use graphtrl::MolecularGraph;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

/// A sample molecule after up to `edits` random valid actions. Ring closures
/// are limited to four or more atoms so the bond graph stays triangle-free.
pub fn random_molecule(rng: &mut ChaCha8Rng, edits: usize) -> MolecularGraph {
    let mols = sample_molecules().expect("bundled sample parses");
    let start = mols[rng.gen_range(0..mols.len())].1.clone();
    let cfg = EnvConfig {
        max_steps: edits.max(1),
        allowed_ring_sizes: vec![4, 5, 6, 7],
        ..EnvConfig::default()
    };
    let mut state = EnvState::start(start, &cfg);
    for _ in 0..edits {
        let actions = valid_actions(&state, &cfg);
        if actions.is_empty() {
            break;
        }
        let a = &actions[rng.gen_range(0..actions.len())];
        state = apply_action(&state, *a).expect("valid action applies");
    }
    (*state.molecule).clone()
}
