use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use fairspread::experiments::{ExperimentConfig, GraphSource};
use fairspread::sbm::SbmSpec;

fn bin() -> Command {
    Command::new(env!("CARGO_BIN_EXE_fairspread"))
}

fn run(args: &[&str]) -> Output {
    bin().args(args).output().unwrap()
}

fn code(out: &Output) -> i32 {
    out.status.code().unwrap()
}

fn s(p: &Path) -> &str {
    p.to_str().unwrap()
}

fn graph_file(dir: &Path) -> PathBuf {
    let spec = SbmSpec::uniform(vec![15, 10], vec![0.3, 0.2], 0.03).with_p(0.3);
    let spec_path = dir.join("spec.json");
    std::fs::write(&spec_path, serde_json::to_string(&spec).unwrap()).unwrap();
    let graph = dir.join("g.json");
    let out = run(&["gen-sbm", "--spec", s(&spec_path), "--seed", "7", "--out", s(&graph)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    graph
}

#[test]
fn select_output_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph_file(dir.path());
    let args = ["select", "--graph", s(&g), "--k", "3", "--alpha", "-2", "--sketches", "200", "--format", "json"];
    let a = run(&args);
    assert_eq!(code(&a), 0, "{}", String::from_utf8_lossy(&a.stderr));
    let b = run(&args);
    let mut threaded = vec!["--threads", "2"];
    threaded.extend_from_slice(&args);
    let c = run(&threaded);
    assert_eq!(a.stdout, b.stdout);

    let v: serde_json::Value = serde_json::from_slice(&a.stdout).unwrap();
    let w: serde_json::Value = serde_json::from_slice(&c.stdout).unwrap();
    // the embedded config records the thread count; the result must not depend on it
    assert_eq!(v["result"], w["result"]);
    assert_eq!(w["config"]["threads"], 2);
    assert_eq!(v["result"]["seeds"].as_array().unwrap().len(), 3);
    assert_eq!(v["result"]["utilities"].as_array().unwrap().len(), 2);
}

#[test]
fn every_method_runs() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph_file(dir.path());
    for m in ["welfare", "utilitarian", "maximin", "dc"] {
        let out = run(&["select", "--graph", s(&g), "--k", "4", "--method", m, "--sketches", "100", "--format", "csv"]);
        assert_eq!(code(&out), 0, "{m}: {}", String::from_utf8_lossy(&out.stderr));
        assert!(!out.stdout.is_empty());
    }
}

#[test]
fn zero_budget_selects_nothing() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph_file(dir.path());
    let out = run(&["select", "--graph", s(&g), "--k", "0", "--format", "json"]);
    assert_eq!(code(&out), 0);
    let v: serde_json::Value = serde_json::from_slice(&out.stdout).unwrap();
    assert!(v["result"]["seeds"].as_array().unwrap().is_empty());
}

#[test]
fn metrics_accepts_negative_alpha_lists() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph_file(dir.path());
    let out = run(&["metrics", "--graph", s(&g), "--seeds", "0,4,9", "--alpha", "-2,0,0.5", "--format", "json"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = String::from_utf8(out.stdout).unwrap();
    assert!(text.contains("-2"));
}

#[test]
fn exit_codes() {
    let dir = tempfile::tempdir().unwrap();
    let g = graph_file(dir.path());
    assert_eq!(code(&run(&["select", "--graph", s(&g), "--k", "3", "--bogus"])), 2);
    assert_eq!(code(&run(&["select", "--graph", s(&dir.path().join("missing.json")), "--k", "3"])), 3);
    let bad = dir.path().join("bad.json");
    std::fs::write(&bad, "{not json").unwrap();
    assert_eq!(code(&run(&["select", "--graph", s(&bad), "--k", "3"])), 3);
    assert_eq!(code(&run(&["select", "--graph", s(&g), "--k", "26"])), 4);
    assert_eq!(code(&run(&["select", "--graph", s(&g), "--k", "2", "--alpha", "1.5"])), 4);
}

#[test]
fn verify_passes_on_bundled_fixtures() {
    let out = run(&["verify"]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stdout));
}

#[test]
fn sweep_writes_csv_and_metadata() {
    let dir = tempfile::tempdir().unwrap();
    let mut cfg = ExperimentConfig::new(GraphSource::Sbm(SbmSpec::uniform(vec![10, 8], vec![0.3, 0.2], 0.02)));
    cfg.budgets = vec![2];
    cfg.alphas = vec![-2.0];
    cfg.replications = 2;
    cfg.sketches = 50;
    let cfg_path = dir.path().join("cfg.json");
    std::fs::write(&cfg_path, serde_json::to_string(&cfg).unwrap()).unwrap();
    let csv = dir.path().join("out.csv");
    let out = run(&["sweep", "--config", s(&cfg_path), "--format", "csv", "--out", s(&csv)]);
    assert_eq!(code(&out), 0, "{}", String::from_utf8_lossy(&out.stderr));
    let text = std::fs::read_to_string(&csv).unwrap();
    assert!(text.starts_with("instance,replication,method,k,alpha,gap,pof,total,u_0,u_1\n"));
    let meta = dir.path().join("out.csv.meta.json");
    let v: serde_json::Value = serde_json::from_str(&std::fs::read_to_string(meta).unwrap()).unwrap();
    assert!(v.is_object());

    let again = dir.path().join("again.csv");
    run(&["sweep", "--config", s(&cfg_path), "--format", "csv", "--out", s(&again)]);
    assert_eq!(text, std::fs::read_to_string(again).unwrap());
}
