//! `graphtrl`: featurize molecules, train the Q-network, optimize single
//! molecules and evaluate policies.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use graphtrl::parse_smiles;
use graphtrl_cli::commands::{cmd_baseline, cmd_eval, cmd_featurize, cmd_optimize, cmd_train};
use graphtrl_cli::{dataset, CliError, RunConfig};

#[derive(Debug, Parser)]
#[command(
    name = "graphtrl",
    version,
    about = "Topological reinforcement learning for molecular optimization"
)]
struct Cli {
    #[command(subcommand)]
    verb: Verb,
    /// JSON run configuration; defaults apply to absent keys.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,
    /// Overrides `rng_seed`.
    #[arg(long, global = true, value_name = "N")]
    seed: Option<u64>,
    /// Output directory (default `out`).
    #[arg(long, global = true, value_name = "DIR")]
    out: Option<PathBuf>,
    /// SMILES file, one molecule per line; the bundled sample when absent.
    #[arg(long, global = true, value_name = "PATH")]
    input: Option<PathBuf>,
    #[arg(long, global = true, value_name = "PATH")]
    checkpoint: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
enum Verb {
    /// Write feature and persistence-diagram tables.
    Featurize,
    /// Train and write a checkpoint plus a per-episode log.
    Train,
    /// Run one greedy episode and report the best molecules.
    Optimize {
        /// Start molecule; the first molecule of the input otherwise.
        #[arg(long)]
        smiles: Option<String>,
    },
    /// Compare random-walk, ε-greedy and greedy policies.
    Eval,
    /// Random-walk policy only.
    Baseline,
}

fn run(cli: Cli) -> Result<(), CliError> {
    let mut cfg = match &cli.config {
        Some(p) => RunConfig::load(p)?,
        None => RunConfig::default(),
    };
    if let Some(seed) = cli.seed {
        cfg.rng_seed = seed;
    }
    if cli.input.is_some() {
        cfg.paths.input = cli.input;
    }
    if cli.out.is_some() {
        cfg.paths.out = cli.out;
    }
    if cli.checkpoint.is_some() {
        cfg.paths.checkpoint = cli.checkpoint;
    }
    let out = cfg
        .paths
        .out
        .clone()
        .unwrap_or_else(|| PathBuf::from("out"));
    let input = cfg.paths.input.clone();
    let input = input.as_deref();
    let checkpoint = || {
        cfg.paths
            .checkpoint
            .clone()
            .ok_or_else(|| CliError::Usage("this command needs --checkpoint".into()))
    };
    match cli.verb {
        Verb::Featurize => {
            let s = cmd_featurize(&cfg, input, &out)?;
            println!(
                "{} molecules ({} skipped), {} columns -> {}, {}",
                s.rows,
                s.skipped,
                s.columns,
                s.features_path.display(),
                s.diagrams_path.display()
            );
        }
        Verb::Train => {
            let s = cmd_train(&cfg, input, &out)?;
            let best = s
                .episodes
                .iter()
                .map(|e| e.best_penalized_logp)
                .fold(f64::NEG_INFINITY, f64::max);
            println!(
                "{} episodes, best penalized logP {best:.3} -> {}, {}",
                s.episodes.len(),
                s.checkpoint_path.display(),
                s.log_path.display()
            );
        }
        Verb::Optimize { smiles } => {
            let start = match smiles {
                Some(s) => parse_smiles(&s).map_err(|e| CliError::Data(format!("{s}: {e}")))?,
                None => dataset::load(input)?.entries.swap_remove(0).molecule,
            };
            let (report, traj, rep) = cmd_optimize(&cfg, &start, &checkpoint()?, &out)?;
            println!(
                "start {} ({:.3})",
                report.start_smiles, report.start_penalized_logp
            );
            for m in &report.top {
                println!("{:>10.3}  {}", m.reward, m.smiles);
            }
            print_paths(&[traj, rep]);
        }
        Verb::Eval => {
            let (report, paths) = cmd_eval(&cfg, input, &checkpoint()?, &out)?;
            print!("{}", report.table());
            print_paths(&paths);
        }
        Verb::Baseline => {
            let (report, paths) = cmd_baseline(&cfg, input, &out)?;
            print!("{}", report.table());
            print_paths(&paths);
        }
    }
    Ok(())
}

fn print_paths(paths: &[impl AsRef<Path>]) {
    for p in paths {
        println!("wrote {}", p.as_ref().display());
    }
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("info")).init();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            log::error!("{e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
