//! Circular hashed fingerprints and Tanimoto similarity.
//!
//! Atom invariants start from (element, degree, charge, total H, in-ring)
//! and are refined by hashing each atom's invariant together with its
//! sorted (bond order, neighbor invariant) list. Every invariant produced at
//! every radius sets one bit. The hash is 64-bit FNV-1a, so the bit layout is
//! stable across platforms and pinned by a golden file in the tests.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::molgraph::MolecularGraph;

const FNV_OFFSET: u64 = 0xcbf2_9ce4_8422_2325;
const FNV_PRIME: u64 = 0x0000_0100_0000_01b3;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum FingerprintError {
    #[error("fingerprint lengths differ: {0} vs {1}")]
    LengthMismatch(usize, usize),
    #[error("invalid fingerprint configuration: {0}")]
    Config(String),
    #[error("malformed fingerprint hex: {0}")]
    Hex(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct FingerprintConfig {
    pub radius: usize,
    pub nbits: usize,
}

impl Default for FingerprintConfig {
    fn default() -> Self {
        FingerprintConfig {
            radius: 2,
            nbits: 1024,
        }
    }
}

impl FingerprintConfig {
    pub fn validate(&self) -> Result<(), FingerprintError> {
        if self.nbits < 8 || !self.nbits.is_power_of_two() {
            return Err(FingerprintError::Config(format!(
                "nbits must be a power of two ≥ 8, got {}",
                self.nbits
            )));
        }
        Ok(())
    }
}

struct Fnv(u64);

impl Fnv {
    fn new() -> Self {
        Fnv(FNV_OFFSET)
    }

    fn bytes(&mut self, bytes: &[u8]) -> &mut Self {
        for &b in bytes {
            self.0 ^= b as u64;
            self.0 = self.0.wrapping_mul(FNV_PRIME);
        }
        self
    }

    fn finish(&self) -> u64 {
        self.0
    }
}

pub fn fnv1a64(bytes: &[u8]) -> u64 {
    Fnv::new().bytes(bytes).finish()
}

/// Invariants for every atom at every radius; `out[r][i]` is atom i after
/// r refinement rounds.
pub fn atom_invariants(g: &MolecularGraph, radius: usize) -> Vec<Vec<u64>> {
    let n = g.num_atoms();
    let seed: Vec<u64> = (0..n)
        .map(|i| {
            let a = g.atom(i);
            Fnv::new()
                .bytes(a.element.symbol().as_bytes())
                .bytes(&[
                    0xff,
                    g.degree(i) as u8,
                    a.formal_charge as u8,
                    g.total_h(i),
                    g.is_ring_atom(i) as u8,
                ])
                .finish()
        })
        .collect();
    let mut rounds = vec![seed];
    for _ in 0..radius {
        let prev = rounds.last().unwrap();
        let next = (0..n)
            .map(|i| {
                let mut env: Vec<(u8, u64)> = g
                    .neighbors(i)
                    .iter()
                    .map(|&(j, b)| (g.bond(b).order, prev[j]))
                    .collect();
                env.sort_unstable();
                let mut h = Fnv::new();
                h.bytes(&prev[i].to_le_bytes());
                for (order, inv) in env {
                    h.bytes(&[order]).bytes(&inv.to_le_bytes());
                }
                h.finish()
            })
            .collect();
        rounds.push(next);
    }
    rounds
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Fingerprint {
    nbits: usize,
    words: Vec<u64>,
}

impl Fingerprint {
    pub fn zeros(nbits: usize) -> Self {
        Fingerprint {
            nbits,
            words: vec![0; nbits.div_ceil(64)],
        }
    }

    pub fn len(&self) -> usize {
        self.nbits
    }

    pub fn is_empty(&self) -> bool {
        self.nbits == 0
    }

    pub fn set(&mut self, bit: usize) {
        self.words[bit / 64] |= 1 << (bit % 64);
    }

    pub fn get(&self, bit: usize) -> bool {
        self.words[bit / 64] >> (bit % 64) & 1 == 1
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.nbits).filter(|&i| self.get(i))
    }

    /// Two hex digits per byte, byte k covering bits 8k..8k+7 with bit 8k
    /// as the least significant.
    pub fn to_hex(&self) -> String {
        let mut s = String::with_capacity(self.nbits / 4);
        for byte in 0..self.nbits / 8 {
            let b = (self.words[byte / 8] >> ((byte % 8) * 8)) as u8;
            s.push_str(&format!("{b:02x}"));
        }
        s
    }

    pub fn from_hex(hex: &str) -> Result<Self, FingerprintError> {
        if !hex.len().is_multiple_of(2) {
            return Err(FingerprintError::Hex("odd number of digits".into()));
        }
        let mut fp = Fingerprint::zeros(hex.len() * 4);
        for byte in 0..hex.len() / 2 {
            let b = u8::from_str_radix(&hex[2 * byte..2 * byte + 2], 16)
                .map_err(|e| FingerprintError::Hex(e.to_string()))?;
            fp.words[byte / 8] |= (b as u64) << ((byte % 8) * 8);
        }
        Ok(fp)
    }
}

impl Serialize for Fingerprint {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_hex())
    }
}

impl<'de> Deserialize<'de> for Fingerprint {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        Fingerprint::from_hex(&s).map_err(serde::de::Error::custom)
    }
}

pub fn morgan_fingerprint(
    g: &MolecularGraph,
    cfg: &FingerprintConfig,
) -> Result<Fingerprint, FingerprintError> {
    cfg.validate()?;
    let mut fp = Fingerprint::zeros(cfg.nbits);
    for round in atom_invariants(g, cfg.radius) {
        for inv in round {
            fp.set((inv % cfg.nbits as u64) as usize);
        }
    }
    Ok(fp)
}

/// |a ∧ b| / |a ∨ b|, taken as 1 for two empty fingerprints.
pub fn tanimoto(a: &Fingerprint, b: &Fingerprint) -> Result<f64, FingerprintError> {
    if a.nbits != b.nbits {
        return Err(FingerprintError::LengthMismatch(a.nbits, b.nbits));
    }
    let (mut both, mut either) = (0u32, 0u32);
    for (x, y) in a.words.iter().zip(&b.words) {
        both += (x & y).count_ones();
        either += (x | y).count_ones();
    }
    Ok(if either == 0 {
        1.0
    } else {
        both as f64 / either as f64
    })
}
