//! Topological and graph-based featurization of small molecules, and a
//! dueling deep Q-network that edits molecules through chemically valid
//! actions.

// `!(x > 0.0)` guards reject NaN as well as non-positive values.
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod agent;
pub mod chemprops;
pub mod environment;
pub mod fingerprint;
pub mod metric;
pub mod molgraph;
pub mod mwcg;
pub mod rewards;
pub mod sample;
pub mod topology;

pub use molgraph::{parse_smiles, write_smiles, MolError, MolecularGraph};
