//! Multiscale weighted colored graph (MWCG) features.
//!
//! Atoms are colored by element or SYBYL type. For every unordered pair of
//! colors (k, k′) and every kernel scale η, each atom i of color k collects
//! μᵢ = Σⱼ exp(−(dᵢⱼ/η)^κ) over atoms j of color k′ that are within the
//! cutoff and not covalently bonded to i (and symmetrically for atoms of
//! color k′). Each (pair, scale) slot reports the sum, mean and max of μᵢ
//! over the atoms that have at least one such partner.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::metric::DistanceMatrix;
use crate::molgraph::{sybyl_type, MolecularGraph, SYBYL_TYPES};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MwcgError {
    #[error("kernel domain error: {0}")]
    Domain(String),
    #[error("distance matrix has {got} points but the molecule has {expected} atoms")]
    Shape { expected: usize, got: usize },
    #[error("invalid MWCG configuration: {0}")]
    Config(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum ColorMode {
    Element,
    Sybyl,
}

pub const DEFAULT_ELEMENT_VOCABULARY: [&str; 9] = ["C", "N", "O", "F", "P", "S", "Cl", "Br", "I"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct MwcgConfig {
    pub scales: Vec<f64>,
    pub kappa: f64,
    pub cutoff: f64,
    pub color_mode: ColorMode,
    /// Overrides the default vocabulary for `color_mode`. Atoms whose color
    /// is not listed contribute nothing.
    pub type_vocabulary: Option<Vec<String>>,
}

impl Default for MwcgConfig {
    fn default() -> Self {
        MwcgConfig {
            scales: vec![1.5, 3.0, 6.0, 12.0],
            kappa: 2.0,
            cutoff: 12.0,
            color_mode: ColorMode::Sybyl,
            type_vocabulary: None,
        }
    }
}

pub const STATISTICS: [&str; 3] = ["sum", "mean", "max"];

impl MwcgConfig {
    pub fn validate(&self) -> Result<(), MwcgError> {
        if self.scales.is_empty() {
            return Err(MwcgError::Config("at least one scale is required".into()));
        }
        if self.scales.iter().any(|&s| !(s > 0.0) || !s.is_finite()) {
            return Err(MwcgError::Config("scales must be positive".into()));
        }
        if !(self.kappa > 0.0) || !self.kappa.is_finite() {
            return Err(MwcgError::Config("kappa must be positive".into()));
        }
        if !(self.cutoff > 0.0) {
            return Err(MwcgError::Config("cutoff must be positive".into()));
        }
        let vocab = self.vocabulary();
        for (k, a) in vocab.iter().enumerate() {
            if vocab[..k].contains(a) {
                return Err(MwcgError::Config(format!(
                    "duplicate type '{a}' in vocabulary"
                )));
            }
        }
        if vocab.is_empty() {
            return Err(MwcgError::Config("empty type vocabulary".into()));
        }
        Ok(())
    }

    pub fn vocabulary(&self) -> Vec<String> {
        match (&self.type_vocabulary, self.color_mode) {
            (Some(v), _) => v.clone(),
            (None, ColorMode::Element) => DEFAULT_ELEMENT_VOCABULARY
                .iter()
                .map(|s| s.to_string())
                .collect(),
            (None, ColorMode::Sybyl) => SYBYL_TYPES.iter().map(|s| s.to_string()).collect(),
        }
    }

    pub fn num_pairs(&self) -> usize {
        let v = self.vocabulary().len();
        v * (v + 1) / 2
    }

    pub fn feature_len(&self) -> usize {
        self.num_pairs() * self.scales.len() * STATISTICS.len()
    }

    /// Column names `pair:scale:stat`, in layout order.
    pub fn feature_names(&self) -> Vec<String> {
        let vocab = self.vocabulary();
        let mut names = Vec::with_capacity(self.feature_len());
        for k in 0..vocab.len() {
            for k2 in k..vocab.len() {
                for eta in &self.scales {
                    for stat in STATISTICS {
                        names.push(format!("{}-{}:{:?}:{}", vocab[k], vocab[k2], eta, stat));
                    }
                }
            }
        }
        names
    }

    /// Color of every atom as an index into the vocabulary.
    pub fn atom_colors(&self, g: &MolecularGraph) -> Vec<Option<usize>> {
        let vocab = self.vocabulary();
        (0..g.num_atoms())
            .map(|i| {
                let code = match self.color_mode {
                    ColorMode::Element => g.atom(i).element.symbol(),
                    ColorMode::Sybyl => sybyl_type(g, i).code(),
                };
                vocab.iter().position(|v| v == code)
            })
            .collect()
    }
}

/// Generalized exponential kernel exp(−(d/η)^κ).
pub fn kernel(d: f64, eta: f64, kappa: f64) -> Result<f64, MwcgError> {
    if !(eta > 0.0) {
        return Err(MwcgError::Domain(format!(
            "eta must be positive, got {eta}"
        )));
    }
    if !(kappa > 0.0) {
        return Err(MwcgError::Domain(format!(
            "kappa must be positive, got {kappa}"
        )));
    }
    if !(d >= 0.0) {
        return Err(MwcgError::Domain(format!(
            "distance must be non-negative, got {d}"
        )));
    }
    Ok(kernel_unchecked(d, eta, kappa))
}

#[inline]
fn kernel_unchecked(d: f64, eta: f64, kappa: f64) -> f64 {
    (-(d / eta).powf(kappa)).exp()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MwcgFeatureVector {
    pub values: Vec<f64>,
}

/// Row-major index of the unordered pair in the upper triangle of a
/// `v × v` color table.
fn pair_index(k: usize, k2: usize, v: usize) -> usize {
    let (a, b) = if k <= k2 { (k, k2) } else { (k2, k) };
    a * (2 * v - a + 1) / 2 + (b - a)
}

pub fn mwcg_features(
    g: &MolecularGraph,
    dm: &DistanceMatrix,
    cfg: &MwcgConfig,
) -> Result<MwcgFeatureVector, MwcgError> {
    let n = g.num_atoms();
    if dm.len() != n {
        return Err(MwcgError::Shape {
            expected: n,
            got: dm.len(),
        });
    }
    cfg.validate()?;
    let colors = cfg.atom_colors(g);
    let v = cfg.vocabulary().len();
    let ns = cfg.scales.len();

    // mu[(i * v + partner_color) * ns + s], plus partner counts
    let mut mu = vec![0.0f64; n * v * ns];
    let mut partners = vec![0u32; n * v];
    for i in 0..n {
        if colors[i].is_none() {
            continue;
        }
        for (j, cj) in colors.iter().enumerate() {
            if i == j {
                continue;
            }
            let Some(cj) = *cj else { continue };
            let d = dm.get(i, j);
            if d > cfg.cutoff || g.bond_between(i, j).is_some() {
                continue;
            }
            partners[i * v + cj] += 1;
            for (s, &eta) in cfg.scales.iter().enumerate() {
                mu[(i * v + cj) * ns + s] += kernel_unchecked(d, eta, cfg.kappa);
            }
        }
    }

    let mut values = vec![0.0f64; cfg.feature_len()];
    let mut counts = vec![0u32; cfg.num_pairs() * ns];
    for i in 0..n {
        let Some(ci) = colors[i] else { continue };
        for cj in 0..v {
            if partners[i * v + cj] == 0 {
                continue;
            }
            let p = pair_index(ci, cj, v);
            for s in 0..ns {
                let m = mu[(i * v + cj) * ns + s];
                let base = (p * ns + s) * 3;
                values[base] += m;
                values[base + 2] = values[base + 2].max(m);
                counts[p * ns + s] += 1;
            }
        }
    }
    for (slot, &c) in counts.iter().enumerate() {
        if c > 0 {
            values[slot * 3 + 1] = values[slot * 3] / c as f64;
        }
    }
    Ok(MwcgFeatureVector { values })
}
