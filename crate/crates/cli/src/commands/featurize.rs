//! `featurize`: state features, diagrams and properties for a SMILES file.

use std::io::Write;
use std::path::{Path, PathBuf};

use graphtrl::chemprops::properties;
use graphtrl::environment::molecule_features;
use graphtrl::write_smiles;

use super::{prepare_out, write_file};
use crate::config::RunConfig;
use crate::dataset;
use crate::error::CliError;

#[derive(Debug, Clone, PartialEq)]
pub struct FeaturizeSummary {
    pub rows: usize,
    pub skipped: usize,
    pub columns: usize,
    pub features_path: PathBuf,
    pub diagrams_path: PathBuf,
}

/// Header of the feature table: input line and canonical SMILES, the MWCG
/// block, the image block, the fingerprint as hex, then properties and
/// Betti numbers.
pub fn feature_header(cfg: &RunConfig) -> Vec<String> {
    let f = &cfg.env.features;
    let mut h = vec!["line".to_string(), "smiles".to_string()];
    h.extend(
        f.mwcg
            .feature_names()
            .into_iter()
            .map(|n| format!("mwcg:{n}")),
    );
    let img = &f.topology.image;
    for dim in 0..2 {
        for r in 0..img.rows {
            for c in 0..img.cols {
                h.push(format!("pi:h{dim}:r{r}:c{c}"));
            }
        }
    }
    h.extend(
        [
            "fingerprint",
            "logp",
            "sa",
            "penalized_logp",
            "mol_weight",
            "betti0",
            "betti1",
        ]
        .iter()
        .map(|s| s.to_string()),
    );
    h
}

pub fn cmd_featurize(
    cfg: &RunConfig,
    input: Option<&Path>,
    out_dir: &Path,
) -> Result<FeaturizeSummary, CliError> {
    let data = dataset::load(input)?;
    prepare_out(out_dir)?;
    let header = feature_header(cfg);
    let mut feature_rows = Vec::with_capacity(data.entries.len());
    let mut diagram_rows = Vec::new();
    for e in &data.entries {
        let feats = molecule_features(&e.molecule, &cfg.env.features).map_err(|err| {
            CliError::Data(format!("line {}: {}: {err}", e.line_number, e.smiles))
        })?;
        let props = properties(&e.molecule).map_err(|err| {
            CliError::Data(format!("line {}: {}: {err}", e.line_number, e.smiles))
        })?;
        let smiles = write_smiles(&e.molecule);
        let mut cells = vec![e.line_number.to_string(), smiles.clone()];
        cells.extend(feats.mwcg.iter().map(f64::to_string));
        cells.extend(feats.image.values.iter().map(f64::to_string));
        cells.push(feats.fingerprint.to_hex());
        cells.extend(
            [props.logp, props.sa, props.penalized_logp, props.mol_weight].map(|v| v.to_string()),
        );
        cells.push(feats.betti0.to_string());
        cells.push(feats.betti1.to_string());
        debug_assert_eq!(cells.len(), header.len());
        feature_rows.push(cells.join(","));
        for row in feats.diagram.csv_rows() {
            diagram_rows.push(format!("{},{smiles},{row}", e.line_number));
        }
    }
    let features_path = write_file(&out_dir.join("features.csv"), |w| {
        writeln!(w, "{}", header.join(","))?;
        feature_rows.iter().try_for_each(|r| writeln!(w, "{r}"))
    })?;
    let diagrams_path = write_file(&out_dir.join("diagrams.csv"), |w| {
        writeln!(w, "line,smiles,dim,birth,death")?;
        diagram_rows.iter().try_for_each(|r| writeln!(w, "{r}"))
    })?;
    log::info!(
        "featurized {} molecules, skipped {}",
        feature_rows.len(),
        data.skipped
    );
    Ok(FeaturizeSummary {
        rows: feature_rows.len(),
        skipped: data.skipped,
        columns: header.len(),
        features_path,
        diagrams_path,
    })
}
