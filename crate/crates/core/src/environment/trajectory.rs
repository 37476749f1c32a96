//! JSON-lines trajectory logs, one record per step.

use std::io::{self, BufRead, Write};

use serde::{Deserialize, Serialize};

use super::MolAction;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrajectoryRecord {
    pub step: usize,
    pub action: MolAction,
    pub smiles: String,
    pub reward: f64,
    pub state_vector_hash: String,
}

pub fn write_trajectory<W: Write>(mut w: W, records: &[TrajectoryRecord]) -> io::Result<()> {
    for r in records {
        serde_json::to_writer(&mut w, r)?;
        w.write_all(b"\n")?;
    }
    Ok(())
}

pub fn read_trajectory<R: BufRead>(r: R) -> io::Result<Vec<TrajectoryRecord>> {
    let mut out = Vec::new();
    for line in r.lines() {
        let line = line?;
        if line.trim().is_empty() {
            continue;
        }
        out.push(serde_json::from_str(&line)?);
    }
    Ok(out)
}
