//! `eval` and `baseline`: one episode per input molecule for each policy,
//! summarized as best-molecule lists, mean improvement and validity.

use std::fmt::Write as _;
use std::io::Write;
use std::path::{Path, PathBuf};

use graphtrl::agent::{run_episode, Agent, EpisodeEnv};
use graphtrl::parse_smiles;
use serde::{Deserialize, Serialize};

use super::{featurizer, load_agent, prepare_out, stream_rng, write_file};
use crate::config::RunConfig;
use crate::dataset;
use crate::error::CliError;
use crate::stats::{mean, sign_test, top_k_unique, SignTest};

const EVAL_STREAM_BASE: u64 = 1 << 40;

#[derive(Debug, Clone, Copy, PartialEq)]
enum Policy {
    RandomWalk,
    EpsilonGreedy(f64),
    Greedy,
}

impl Policy {
    fn name(self) -> &'static str {
        match self {
            Policy::RandomWalk => "random_walk",
            Policy::EpsilonGreedy(_) => "epsilon_greedy",
            Policy::Greedy => "greedy",
        }
    }

    fn epsilon(self) -> f64 {
        match self {
            Policy::RandomWalk => 1.0,
            Policy::EpsilonGreedy(e) => e,
            Policy::Greedy => 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MoleculeOutcome {
    pub index: usize,
    pub start_smiles: String,
    pub start_penalized_logp: f64,
    pub final_smiles: String,
    pub final_penalized_logp: f64,
    pub best_smiles: String,
    pub best_penalized_logp: f64,
    pub steps: usize,
    pub valid_steps: usize,
}

impl MoleculeOutcome {
    pub fn improvement(&self) -> f64 {
        self.final_penalized_logp - self.start_penalized_logp
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PolicyReport {
    pub policy: String,
    pub epsilon: f64,
    /// Best distinct molecules reached by any step, by penalized logP.
    pub top: Vec<(String, f64)>,
    /// Mean of final minus start penalized logP.
    pub mean_improvement: f64,
    pub mean_final_penalized_logp: f64,
    pub validity_pct: f64,
    pub outcomes: Vec<MoleculeOutcome>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EvalReport {
    pub policies: Vec<PolicyReport>,
    /// Per-molecule improvement of each learned policy against the random
    /// walk.
    pub sign_tests: Vec<(String, SignTest)>,
    pub top_k: usize,
}

impl EvalReport {
    pub fn policy(&self, name: &str) -> Option<&PolicyReport> {
        self.policies.iter().find(|p| p.policy == name)
    }

    pub fn summary_csv(&self) -> String {
        let mut s = String::from("policy,epsilon");
        for k in 1..=self.top_k {
            let _ = write!(s, ",top{k}_penalized_logp,top{k}_smiles");
        }
        s.push_str(",mean_improvement,mean_final_penalized_logp,validity_pct,episodes\n");
        for p in &self.policies {
            let _ = write!(s, "{},{}", p.policy, p.epsilon);
            for k in 0..self.top_k {
                match p.top.get(k) {
                    Some((smiles, v)) => {
                        let _ = write!(s, ",{v},{smiles}");
                    }
                    None => s.push_str(",,"),
                }
            }
            let _ = writeln!(
                s,
                ",{},{},{},{}",
                p.mean_improvement,
                p.mean_final_penalized_logp,
                p.validity_pct,
                p.outcomes.len()
            );
        }
        s
    }

    pub fn episodes_csv(&self) -> String {
        let mut s = String::from(
            "policy,index,start_smiles,start_penalized_logp,final_smiles,final_penalized_logp,\
             best_smiles,best_penalized_logp,improvement,steps,valid_steps\n",
        );
        for p in &self.policies {
            for o in &p.outcomes {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{},{},{},{},{},{}",
                    p.policy,
                    o.index,
                    o.start_smiles,
                    o.start_penalized_logp,
                    o.final_smiles,
                    o.final_penalized_logp,
                    o.best_smiles,
                    o.best_penalized_logp,
                    o.improvement(),
                    o.steps,
                    o.valid_steps
                );
            }
        }
        s
    }

    /// Fixed-width table for terminals.
    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = write!(s, "{:<16}", "policy");
        for k in 1..=self.top_k {
            let _ = write!(s, "{:>10}", format!("top{k}"));
        }
        let _ = writeln!(s, "{:>14}{:>10}", "mean impr.", "valid %");
        for p in &self.policies {
            let _ = write!(s, "{:<16}", p.policy);
            for k in 0..self.top_k {
                match p.top.get(k) {
                    Some((_, v)) => {
                        let _ = write!(s, "{v:>10.2}");
                    }
                    None => {
                        let _ = write!(s, "{:>10}", "-");
                    }
                }
            }
            let _ = writeln!(s, "{:>14.3}{:>10.1}", p.mean_improvement, p.validity_pct);
        }
        for (name, t) in &self.sign_tests {
            let _ = writeln!(
                s,
                "sign test {name} vs random_walk: {} wins, {} losses, {} ties, one-sided p = {:.4}",
                t.wins, t.losses, t.ties, t.p_value
            );
        }
        s
    }
}

fn run_policy(
    policy: Policy,
    policy_index: u64,
    cfg: &RunConfig,
    entries: &[dataset::Entry],
    envs: &EpisodeEnv<'_>,
    mut agent: Option<&mut Agent>,
) -> Result<PolicyReport, CliError> {
    let mut outcomes = Vec::with_capacity(entries.len());
    let mut visited: Vec<(String, f64)> = Vec::new();
    for (i, e) in entries.iter().enumerate() {
        let mut rng = stream_rng(
            cfg.rng_seed,
            EVAL_STREAM_BASE + (policy_index << 32) + i as u64,
        );
        let who = match policy {
            Policy::RandomWalk => None,
            _ => agent.as_deref_mut(),
        };
        let r = run_episode(who, &e.molecule, envs, policy.epsilon(), false, &mut rng)?;
        let valid_steps = r
            .steps
            .iter()
            .filter(|s| parse_smiles(&s.smiles).is_ok())
            .count();
        let (best_smiles, best_penalized_logp) = r
            .steps
            .iter()
            .map(|s| (s.smiles.as_str(), s.penalized_logp))
            .fold((r.start_smiles.as_str(), f64::NEG_INFINITY), |acc, x| {
                if x.1 > acc.1 {
                    x
                } else {
                    acc
                }
            });
        visited.extend(r.steps.iter().map(|s| (s.smiles.clone(), s.penalized_logp)));
        outcomes.push(MoleculeOutcome {
            index: i,
            start_smiles: r.start_smiles.clone(),
            start_penalized_logp: r.start_penalized_logp,
            final_smiles: r.final_smiles().to_string(),
            final_penalized_logp: r.final_penalized_logp(),
            best_smiles: best_smiles.to_string(),
            best_penalized_logp: if r.steps.is_empty() {
                r.start_penalized_logp
            } else {
                best_penalized_logp
            },
            steps: r.steps.len(),
            valid_steps,
        });
    }
    let total: usize = outcomes.iter().map(|o| o.steps).sum();
    let valid: usize = outcomes.iter().map(|o| o.valid_steps).sum();
    let improvements: Vec<f64> = outcomes.iter().map(MoleculeOutcome::improvement).collect();
    let finals: Vec<f64> = outcomes.iter().map(|o| o.final_penalized_logp).collect();
    log::info!(
        "{}: {} episodes, mean improvement {:.3}",
        policy.name(),
        outcomes.len(),
        mean(&improvements)
    );
    Ok(PolicyReport {
        policy: policy.name().to_string(),
        epsilon: policy.epsilon(),
        top: top_k_unique(
            visited.iter().map(|(s, v)| (s.as_str(), *v)),
            cfg.protocol.top_k,
        ),
        mean_improvement: mean(&improvements),
        mean_final_penalized_logp: mean(&finals),
        validity_pct: if total == 0 {
            100.0
        } else {
            100.0 * valid as f64 / total as f64
        },
        outcomes,
    })
}

fn evaluate(
    cfg: &RunConfig,
    input: Option<&Path>,
    checkpoint: Option<&Path>,
    out_dir: &Path,
) -> Result<(EvalReport, Vec<PathBuf>), CliError> {
    let data = dataset::load(input)?;
    let fz = featurizer(cfg);
    let mut agent = checkpoint.map(|p| load_agent(p, &fz)).transpose()?;
    prepare_out(out_dir)?;
    let envs = EpisodeEnv {
        env: &cfg.env,
        reward: &cfg.reward,
        featurizer: &fz,
    };
    let mut policies = vec![Policy::RandomWalk];
    if agent.is_some() {
        policies.push(Policy::EpsilonGreedy(cfg.protocol.eval_epsilon));
        policies.push(Policy::Greedy);
    }
    let mut reports = Vec::new();
    for (k, &p) in policies.iter().enumerate() {
        reports.push(run_policy(
            p,
            k as u64,
            cfg,
            &data.entries,
            &envs,
            agent.as_mut(),
        )?);
    }
    let random: Vec<f64> = reports[0]
        .outcomes
        .iter()
        .map(MoleculeOutcome::improvement)
        .collect();
    let sign_tests = reports[1..]
        .iter()
        .map(|p| {
            let pairs = p
                .outcomes
                .iter()
                .map(MoleculeOutcome::improvement)
                .zip(random.iter().copied());
            (p.policy.clone(), sign_test(pairs))
        })
        .collect();
    let report = EvalReport {
        policies: reports,
        sign_tests,
        top_k: cfg.protocol.top_k,
    };
    let paths = vec![
        write_file(&out_dir.join("eval_summary.csv"), |w| {
            w.write_all(report.summary_csv().as_bytes())
        })?,
        write_file(&out_dir.join("eval_episodes.csv"), |w| {
            w.write_all(report.episodes_csv().as_bytes())
        })?,
        write_file(&out_dir.join("eval_report.txt"), |w| {
            w.write_all(report.table().as_bytes())
        })?,
    ];
    Ok((report, paths))
}

/// Random walk, ε-greedy and greedy policies from a checkpoint.
pub fn cmd_eval(
    cfg: &RunConfig,
    input: Option<&Path>,
    checkpoint: &Path,
    out_dir: &Path,
) -> Result<(EvalReport, Vec<PathBuf>), CliError> {
    evaluate(cfg, input, Some(checkpoint), out_dir)
}

/// The random-walk policy alone; needs no checkpoint.
pub fn cmd_baseline(
    cfg: &RunConfig,
    input: Option<&Path>,
    out_dir: &Path,
) -> Result<(EvalReport, Vec<PathBuf>), CliError> {
    evaluate(cfg, input, None, out_dir)
}
