//! SMILES input files.

use std::fs::File;
use std::io::BufReader;
use std::path::Path;

use graphtrl::molgraph::read_smiles_lines;
use graphtrl::sample::SAMPLE_SMILES;
use graphtrl::MolecularGraph;

use crate::error::CliError;

#[derive(Debug, Clone)]
pub struct Entry {
    pub line_number: usize,
    pub smiles: String,
    pub molecule: MolecularGraph,
}

#[derive(Debug, Clone)]
pub struct Dataset {
    pub entries: Vec<Entry>,
    pub skipped: usize,
}

/// Reads `path`, or the bundled sample when `None`. Unparseable lines are
/// logged and counted; a file with no usable line is a data error.
pub fn load(path: Option<&Path>) -> Result<Dataset, CliError> {
    let lines = match path {
        Some(p) => {
            let f = File::open(p).map_err(|e| CliError::io(p, e))?;
            read_smiles_lines(BufReader::new(f)).map_err(|e| CliError::io(p, e))?
        }
        None => {
            read_smiles_lines(SAMPLE_SMILES.as_bytes()).expect("reading from memory cannot fail")
        }
    };
    let source = path.map_or_else(|| "bundled sample".to_string(), |p| p.display().to_string());
    let mut entries = Vec::new();
    let mut skipped = 0;
    for line in lines {
        match line.parsed {
            Ok(molecule) => entries.push(Entry {
                line_number: line.line_number,
                smiles: line.text,
                molecule,
            }),
            Err(e) => {
                log::warn!(
                    "{source}:{}: skipping '{}': {e}",
                    line.line_number,
                    line.text
                );
                skipped += 1;
            }
        }
    }
    if entries.is_empty() {
        return Err(CliError::Data(format!(
            "{source}: no valid SMILES ({skipped} skipped)"
        )));
    }
    if skipped > 0 {
        log::info!(
            "{source}: {} molecules read, {skipped} skipped",
            entries.len()
        );
    }
    Ok(Dataset { entries, skipped })
}
