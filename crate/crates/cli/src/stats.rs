//! Summary statistics for evaluation reports.

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

/// Outcome of a paired sign test, ties excluded.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SignTest {
    pub wins: usize,
    pub losses: usize,
    pub ties: usize,
    /// One-sided P(at least `wins` successes) under Binomial(wins + losses, ½).
    pub p_value: f64,
}

pub fn sign_test(pairs: impl IntoIterator<Item = (f64, f64)>) -> SignTest {
    let (mut wins, mut losses, mut ties) = (0, 0, 0);
    for (a, b) in pairs {
        if a > b {
            wins += 1;
        } else if a < b {
            losses += 1;
        } else {
            ties += 1;
        }
    }
    SignTest {
        wins,
        losses,
        ties,
        p_value: binomial_upper_tail(wins + losses, wins),
    }
}

/// P(X ≥ k) for X ~ Binomial(n, ½), summed in log space.
pub fn binomial_upper_tail(n: usize, k: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    if k > n {
        return 0.0;
    }
    let ln2n = n as f64 * std::f64::consts::LN_2;
    // ln C(n, j), built up from ln C(n, 0) = 0
    let mut ln_c = 0.0;
    let mut total = 0.0;
    for j in 0..=n {
        if j > 0 {
            ln_c += ((n - j + 1) as f64).ln() - (j as f64).ln();
        }
        if j >= k {
            total += (ln_c - ln2n).exp();
        }
    }
    total.min(1.0)
}

/// The `k` best distinct SMILES by score, highest first; equal scores are
/// ordered by SMILES so the list is deterministic.
pub fn top_k_unique<'a>(
    items: impl IntoIterator<Item = (&'a str, f64)>,
    k: usize,
) -> Vec<(String, f64)> {
    let mut best: BTreeMap<&str, f64> = BTreeMap::new();
    for (s, v) in items {
        let e = best.entry(s).or_insert(v);
        if v > *e {
            *e = v;
        }
    }
    let mut ranked: Vec<(String, f64)> =
        best.into_iter().map(|(s, v)| (s.to_string(), v)).collect();
    ranked.sort_by(|a, b| b.1.total_cmp(&a.1).then_with(|| a.0.cmp(&b.0)));
    ranked.truncate(k);
    ranked
}

pub fn mean(xs: &[f64]) -> f64 {
    if xs.is_empty() {
        return f64::NAN;
    }
    xs.iter().sum::<f64>() / xs.len() as f64
}
