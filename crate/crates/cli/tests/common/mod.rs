#![allow(dead_code)]

use std::path::{Path, PathBuf};
use std::process::{Command, Output};

pub const BIN: &str = env!("CARGO_BIN_EXE_culinaria");

/// Pipeline outputs checked against `tests/golden`, as (output path, golden file).
pub const GOLDEN: [(&str, &str); 6] = [
    ("summary.tsv", "summary.tsv"),
    ("jaccard/tree.newick", "jaccard.newick"),
    ("cosine/tree.newick", "cosine.newick"),
    ("euclidean/tree.newick", "euclidean.newick"),
    ("authenticity.csv", "authenticity.csv"),
    ("comparison.json", "comparison.json"),
];

pub fn workspace_root() -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("../..")
}

pub fn mini_corpus() -> PathBuf {
    workspace_root().join("data/mini_corpus.jsonl")
}

pub fn golden(name: &str) -> String {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/golden").join(name);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}

pub fn run(args: &[&str]) -> Output {
    Command::new(BIN).args(args).output().expect("spawn culinaria")
}

pub fn run_ok(args: &[&str]) -> Output {
    let out = run(args);
    assert!(out.status.success(), "culinaria {args:?} failed:\n{}", String::from_utf8_lossy(&out.stderr));
    out
}

/// Runs mine, cluster, authenticity and geo on `input`, then compares the
/// euclidean tree with the geographic one.
pub fn pipeline(input: &Path, out: &Path, threads: usize) -> Result<(), String> {
    let input = input.to_str().unwrap();
    let out_s = out.to_str().unwrap();
    let threads = threads.to_string();
    let global = ["--input", input, "--out", out_s, "--threads", threads.as_str()];
    let left = out.join("euclidean");
    let right = out.join("geo");
    let steps: [Vec<&str>; 5] = [
        vec!["mine"],
        vec!["cluster"],
        vec!["authenticity"],
        vec!["geo"],
        vec!["compare", "--left", left.to_str().unwrap(), "--right", right.to_str().unwrap()],
    ];
    for step in steps {
        let args: Vec<&str> = global.iter().copied().chain(step).collect();
        let o = run(&args);
        if !o.status.success() {
            return Err(format!("{args:?}: {}", String::from_utf8_lossy(&o.stderr)));
        }
    }
    Ok(())
}

pub fn read(dir: &Path, rel: &str) -> String {
    let path = dir.join(rel);
    std::fs::read_to_string(&path).unwrap_or_else(|e| panic!("{}: {e}", path.display()))
}
