//! MWCG features against an explicit double loop.

mod oracles;

use graphtrl::metric::geodesic_distances;
use graphtrl::mwcg::{mwcg_features, ColorMode, MwcgConfig};
use graphtrl::parse_smiles;
use graphtrl::sample::sample_molecules;
use oracles::mwcg::brute_mwcg;

#[test]
fn matches_double_loop_on_small_sample_molecules() {
    let small: Vec<_> = sample_molecules()
        .unwrap()
        .into_iter()
        .filter(|(_, g)| g.num_atoms() <= 10)
        .collect();
    assert!(small.len() >= 10, "only {} small molecules", small.len());
    for mode in [ColorMode::Sybyl, ColorMode::Element] {
        let cfg = MwcgConfig {
            color_mode: mode,
            ..MwcgConfig::default()
        };
        for (smiles, g) in &small {
            let dm = geodesic_distances(g, 1.5).unwrap();
            let got = mwcg_features(g, &dm, &cfg).unwrap().values;
            assert_eq!(got, brute_mwcg(g, &dm, &cfg), "{smiles} {mode:?}");
        }
    }
}

#[test]
fn two_bonded_atoms_give_all_zero_features() {
    for smiles in ["CO", "CC", "C=O", "C#N"] {
        let g = parse_smiles(smiles).unwrap();
        let dm = geodesic_distances(&g, 1.5).unwrap();
        let v = mwcg_features(&g, &dm, &MwcgConfig::default())
            .unwrap()
            .values;
        assert!(v.iter().all(|&x| x == 0.0), "{smiles}");
    }
}

#[test]
fn nonbonded_pair_is_nonzero() {
    let g = parse_smiles("CCO").unwrap();
    let dm = geodesic_distances(&g, 1.5).unwrap();
    let v = mwcg_features(&g, &dm, &MwcgConfig::default())
        .unwrap()
        .values;
    assert!(v.iter().any(|&x| x > 0.0));
}
