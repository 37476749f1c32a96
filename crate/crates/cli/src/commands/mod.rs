//! The CLI verbs. Each is a pure function of its inputs, configuration and
//! seed, and writes its files under the output directory.

mod eval;
mod featurize;
mod optimize;
mod train;

pub use eval::{cmd_baseline, cmd_eval, EvalReport, MoleculeOutcome, PolicyReport};
pub use featurize::{cmd_featurize, FeaturizeSummary};
pub use optimize::{cmd_optimize, OptimizeReport, ReportedMolecule};
pub use train::{cmd_train, EpisodeLog, TrainSummary};

use std::fs::File;
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use graphtrl::agent::{Agent, Checkpoint};
use graphtrl::environment::Featurizer;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::config::RunConfig;
use crate::error::CliError;

/// Independent random stream `stream` under the run seed.
pub fn stream_rng(seed: u64, stream: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(stream);
    rng
}

fn featurizer(cfg: &RunConfig) -> Featurizer {
    Featurizer::new(
        cfg.env.features.clone(),
        cfg.env.max_steps,
        cfg.train.feature_cache_capacity,
    )
}

fn prepare_out(dir: &Path) -> Result<(), CliError> {
    std::fs::create_dir_all(dir).map_err(|e| CliError::io(dir, e))
}

/// Writes `path` through a buffered writer filled by `fill`.
fn write_file<F>(path: &Path, fill: F) -> Result<PathBuf, CliError>
where
    F: FnOnce(&mut BufWriter<File>) -> std::io::Result<()>,
{
    let f = File::create(path).map_err(|e| CliError::io(path, e))?;
    let mut w = BufWriter::new(f);
    fill(&mut w)
        .and_then(|_| w.flush())
        .map_err(|e| CliError::io(path, e))?;
    Ok(path.to_path_buf())
}

/// Loads a checkpoint and checks it fits the configured state vector.
pub fn load_agent(path: &Path, featurizer: &Featurizer) -> Result<Agent, CliError> {
    let f = File::open(path).map_err(|e| CliError::io(path, e))?;
    let ck: Checkpoint = serde_json::from_reader(BufReader::new(f))
        .map_err(|e| CliError::Config(format!("{}: not a checkpoint: {e}", path.display())))?;
    let want = featurizer.state_len();
    if ck.layer_sizes.first() != Some(&want) {
        return Err(CliError::Config(format!(
            "{}: checkpoint expects {:?} inputs but the configuration produces {want}",
            path.display(),
            ck.layer_sizes.first()
        )));
    }
    Ok(Agent::from_checkpoint(ck)?)
}
