//! End-to-end checks of every verb on small configurations.

use std::path::Path;
use std::process::Command;

use graphtrl::environment::read_trajectory;
use graphtrl::molgraph::Element;
use graphtrl::mwcg::ColorMode;
use graphtrl::parse_smiles;
use graphtrl::rewards::{reward, RewardReference};
use graphtrl_cli::commands::{cmd_baseline, cmd_eval, cmd_featurize, cmd_optimize, cmd_train};
use graphtrl_cli::{CliError, RunConfig};

fn tiny_config() -> RunConfig {
    let mut cfg = RunConfig::default();
    cfg.env.max_steps = 4;
    cfg.env.features.mwcg.color_mode = ColorMode::Element;
    cfg.env.features.fingerprint.nbits = 64;
    cfg.train.hidden_sizes = vec![16];
    cfg.train.batch_size = 8;
    cfg.train.replay_capacity = 500;
    cfg.train.episodes = 50;
    cfg.train.epsilon_decay_episodes = 30;
    cfg.train.train_frequency = 2;
    cfg.rng_seed = 5;
    cfg
}

fn write(dir: &Path, name: &str, text: &str) -> std::path::PathBuf {
    let p = dir.join(name);
    std::fs::write(&p, text).unwrap();
    p
}

const TOY: &str = "CCO\nc1ccccc1\nCC(=O)O\nCCN\nC1CCCCC1\nOCCO\nCC(C)C\nc1ccncc1\nCOC\nCCCCC\n";

#[test]
fn featurize_skips_bad_lines_and_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.smi", "CCO\nC1CC\nc1ccccc1O\n");
    let cfg = RunConfig::default();
    let a = cmd_featurize(&cfg, Some(&input), &dir.path().join("a")).unwrap();
    assert_eq!((a.rows, a.skipped), (2, 1));
    let f = &cfg.env.features;
    let expected = 2 + f.mwcg.feature_len() + f.topology.image.vector_len() + 1 + 4 + 2;
    assert_eq!(a.columns, expected);
    let text = std::fs::read_to_string(&a.features_path).unwrap();
    assert_eq!(text.lines().count(), 3);
    assert!(text.lines().all(|l| l.split(',').count() == expected));

    let b = cmd_featurize(&cfg, Some(&input), &dir.path().join("b")).unwrap();
    for (x, y) in [
        (&a.features_path, &b.features_path),
        (&a.diagrams_path, &b.diagrams_path),
    ] {
        assert_eq!(std::fs::read(x).unwrap(), std::fs::read(y).unwrap());
    }
}

#[test]
fn empty_input_is_a_data_error() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "in.smi", "# nothing\nC1CC\n");
    let err = cmd_featurize(&RunConfig::default(), Some(&input), dir.path()).unwrap_err();
    assert_eq!(err.exit_code(), 2);
}

#[test]
fn training_is_finite_and_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.smi", TOY);
    let cfg = tiny_config();
    let a = cmd_train(&cfg, Some(&input), &dir.path().join("a")).unwrap();
    assert_eq!(a.episodes.len(), 50);
    assert!(a.episodes.windows(2).all(|w| w[1].epsilon <= w[0].epsilon));
    assert!(a
        .episodes
        .iter()
        .flat_map(|e| e.mean_loss)
        .all(f64::is_finite));
    assert!(a.episodes.iter().any(|e| e.mean_loss.is_some()));
    // every episode starts from the lowest-scoring molecule
    let start = &a.episodes[0].start_smiles;
    assert!(a.episodes.iter().all(|e| &e.start_smiles == start));

    let b = cmd_train(&cfg, Some(&input), &dir.path().join("b")).unwrap();
    assert_eq!(
        std::fs::read(&a.log_path).unwrap(),
        std::fs::read(&b.log_path).unwrap()
    );
    assert_eq!(
        std::fs::read(&a.checkpoint_path).unwrap(),
        std::fs::read(&b.checkpoint_path).unwrap()
    );
}

#[test]
fn optimize_reports_recompute_from_smiles() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.smi", TOY);
    let cfg = tiny_config();
    let t = cmd_train(
        &RunConfig {
            train: graphtrl::agent::TrainConfig {
                episodes: 10,
                ..cfg.train.clone()
            },
            ..cfg.clone()
        },
        Some(&input),
        &dir.path().join("t"),
    )
    .unwrap();
    let start = parse_smiles("CCOC(=O)C").unwrap();
    let (report, traj, _) =
        cmd_optimize(&cfg, &start, &t.checkpoint_path, &dir.path().join("o")).unwrap();
    let records =
        read_trajectory(std::io::BufReader::new(std::fs::File::open(traj).unwrap())).unwrap();
    assert_eq!(records.len(), cfg.env.max_steps);
    for r in &records {
        parse_smiles(&r.smiles).unwrap();
        assert_eq!(r.state_vector_hash.len(), 16);
    }
    let reference = RewardReference::new(&start, &cfg.env.features.fingerprint).unwrap();
    assert!(!report.top.is_empty() && report.top.len() <= cfg.protocol.top_k);
    for m in &report.top {
        assert_eq!(
            reward(&parse_smiles(&m.smiles).unwrap(), &reference, &cfg.reward).unwrap(),
            m.reward
        );
    }
}

#[test]
fn no_op_only_configuration_returns_the_start() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.smi", TOY);
    let mut cfg = tiny_config();
    cfg.train.episodes = 5;
    let t = cmd_train(&cfg, Some(&input), &dir.path().join("t")).unwrap();
    cfg.env.allowed_elements = Vec::<Element>::new();
    cfg.env.allowed_ring_sizes = Vec::new();
    let start = parse_smiles("C").unwrap();
    let (report, _, _) =
        cmd_optimize(&cfg, &start, &t.checkpoint_path, &dir.path().join("o")).unwrap();
    assert_eq!(report.final_smiles, "C");
    assert_eq!(report.top.len(), 1);
    assert_eq!(report.top[0].smiles, "C");
    assert!(report
        .trajectory
        .iter()
        .all(|r| r.action == graphtrl::environment::MolAction::NoOp));
}

#[test]
fn checkpoint_for_other_features_is_rejected() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.smi", TOY);
    let mut cfg = tiny_config();
    cfg.train.episodes = 2;
    let t = cmd_train(&cfg, Some(&input), &dir.path().join("t")).unwrap();
    cfg.env.features.fingerprint.nbits = 128;
    let err = cmd_optimize(
        &cfg,
        &parse_smiles("CC").unwrap(),
        &t.checkpoint_path,
        dir.path(),
    )
    .unwrap_err();
    assert!(matches!(err, CliError::Config(_)), "{err}");
}

#[test]
fn eval_reports_every_policy_and_reruns_identically() {
    let dir = tempfile::tempdir().unwrap();
    let input = write(dir.path(), "toy.smi", TOY);
    let mut cfg = tiny_config();
    cfg.train.episodes = 20;
    let t = cmd_train(&cfg, Some(&input), &dir.path().join("t")).unwrap();
    let (a, pa) = cmd_eval(
        &cfg,
        Some(&input),
        &t.checkpoint_path,
        &dir.path().join("a"),
    )
    .unwrap();
    let (_, pb) = cmd_eval(
        &cfg,
        Some(&input),
        &t.checkpoint_path,
        &dir.path().join("b"),
    )
    .unwrap();
    for (x, y) in pa.iter().zip(&pb) {
        assert_eq!(
            std::fs::read(x).unwrap(),
            std::fs::read(y).unwrap(),
            "{}",
            x.display()
        );
    }
    let names: Vec<&str> = a.policies.iter().map(|p| p.policy.as_str()).collect();
    assert_eq!(names, ["random_walk", "epsilon_greedy", "greedy"]);
    for p in &a.policies {
        assert_eq!(p.validity_pct, 100.0);
        assert_eq!(p.outcomes.len(), 10);
        let mut smiles: Vec<&str> = p.top.iter().map(|(s, _)| s.as_str()).collect();
        smiles.dedup();
        assert_eq!(smiles.len(), p.top.len());
        assert!(p.top.windows(2).all(|w| w[0].1 >= w[1].1));
    }
    assert_eq!(a.sign_tests.len(), 2);

    let (b, _) = cmd_baseline(&cfg, Some(&input), &dir.path().join("c")).unwrap();
    assert_eq!(b.policies.len(), 1);
    assert_eq!(b.policies[0], a.policies[0]);
}

fn graphtrl(args: &[&str], dir: &Path) -> (i32, String) {
    let out = Command::new(env!("CARGO_BIN_EXE_graphtrl"))
        .args(args)
        .current_dir(dir)
        .env("RUST_LOG", "error")
        .output()
        .unwrap();
    (
        out.status.code().unwrap(),
        String::from_utf8_lossy(&out.stdout).into_owned(),
    )
}

#[test]
fn binary_exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let d = dir.path();
    write(d, "bad.json", r#"{"rng_sed": 1}"#);
    write(d, "empty.smi", "C1CC\n");
    write(d, "ok.smi", "CCO\nCCN\n");
    assert_eq!(graphtrl(&["--help"], d).0, 0);
    assert_eq!(graphtrl(&["frobnicate"], d).0, 1);
    assert_eq!(graphtrl(&["featurize", "--config", "bad.json"], d).0, 1);
    assert_eq!(graphtrl(&["eval", "--input", "ok.smi"], d).0, 1);
    assert_eq!(graphtrl(&["featurize", "--input", "empty.smi"], d).0, 2);
    assert_eq!(graphtrl(&["featurize", "--input", "missing.smi"], d).0, 2);
    let (code, stdout) = graphtrl(&["featurize", "--input", "ok.smi", "--out", "f"], d);
    assert_eq!(code, 0);
    assert!(stdout.contains("2 molecules"));
    assert!(d.join("f/features.csv").exists());
}

#[test]
fn numerical_failures_map_to_exit_code_three() {
    let e: CliError = graphtrl::agent::AgentError::Numerical("loss became NaN".into()).into();
    assert_eq!(e.exit_code(), 3);
}
