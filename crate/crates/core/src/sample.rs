//! The bundled molecule sample used by tests, examples and the CLI
//! defaults.

use crate::molgraph::{read_smiles_lines, MolError, MolecularGraph};

pub const SAMPLE_SMILES: &str = include_str!("../data/sample_smiles.txt");

/// SMILES strings of the bundled sample, in file order.
pub fn sample_smiles() -> Vec<String> {
    read_smiles_lines(SAMPLE_SMILES.as_bytes())
        .expect("reading from memory cannot fail")
        .into_iter()
        .map(|l| l.text)
        .collect()
}

/// Parsed bundled sample paired with its SMILES.
pub fn sample_molecules() -> Result<Vec<(String, MolecularGraph)>, MolError> {
    sample_smiles()
        .into_iter()
        .map(|s| crate::molgraph::parse_smiles(&s).map(|g| (s, g)))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sample_parses() {
        let mols = sample_molecules().unwrap();
        assert_eq!(mols.len(), 50);
        assert!(mols.iter().filter(|(_, g)| g.num_atoms() <= 10).count() >= 10);
    }
}
