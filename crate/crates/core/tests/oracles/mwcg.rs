//! MWCG features by an explicit loop over (color pair, scale, atom).

use graphtrl::metric::DistanceMatrix;
use graphtrl::molgraph::{sybyl_type, MolecularGraph};
use graphtrl::mwcg::{ColorMode, MwcgConfig};

pub fn brute_mwcg(g: &MolecularGraph, dm: &DistanceMatrix, cfg: &MwcgConfig) -> Vec<f64> {
    let vocab = cfg.vocabulary();
    let color = |i: usize| -> Option<usize> {
        let code = match cfg.color_mode {
            ColorMode::Element => g.atom(i).element.symbol(),
            ColorMode::Sybyl => sybyl_type(g, i).code(),
        };
        vocab.iter().position(|v| v == code)
    };
    let bonded = |i: usize, j: usize| g.bonds().iter().any(|b| (b.a, b.b) == (i.min(j), i.max(j)));
    let n = g.num_atoms();
    let mut out = Vec::new();
    for k in 0..vocab.len() {
        for k2 in k..vocab.len() {
            for &eta in &cfg.scales {
                let (mut sum, mut max, mut count) = (0.0f64, 0.0f64, 0usize);
                for i in 0..n {
                    let partner = match color(i) {
                        Some(c) if c == k => k2,
                        Some(c) if c == k2 => k,
                        _ => continue,
                    };
                    let mut mu = 0.0;
                    let mut any = false;
                    for j in 0..n {
                        if j == i
                            || color(j) != Some(partner)
                            || bonded(i, j)
                            || dm.get(i, j) > cfg.cutoff
                        {
                            continue;
                        }
                        any = true;
                        mu += (-(dm.get(i, j) / eta).powf(cfg.kappa)).exp();
                    }
                    if any {
                        sum += mu;
                        max = max.max(mu);
                        count += 1;
                    }
                }
                let mean = if count > 0 { sum / count as f64 } else { 0.0 };
                out.extend([sum, mean, max]);
            }
        }
    }
    out
}
