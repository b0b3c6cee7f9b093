#![allow(dead_code)]

use std::fs;
use std::path::{Path, PathBuf};

use serde::Deserialize;
use wordgate::data::nli_jsonl;
use wordgate::data::synthetic::overfit_fixture;
use wordgate::model::ModelDims;

pub fn fixture(name: &str) -> PathBuf {
    Path::new(env!("CARGO_MANIFEST_DIR")).join("tests/fixtures").join(name)
}

#[derive(Deserialize)]
pub struct TokenizerCase {
    pub text: String,
    pub tokens: Vec<String>,
}

#[derive(Deserialize)]
pub struct WelchCase {
    pub a: Vec<f64>,
    pub b: Vec<f64>,
    pub t: f64,
    pub p: f64,
}

#[derive(Deserialize)]
pub struct CorrelationCase {
    pub x: Vec<f64>,
    pub y: Vec<f64>,
    pub pearson: f64,
    pub spearman: f64,
}

pub fn tokenizer_cases() -> Vec<TokenizerCase> {
    fs::read_to_string(fixture("treebank_500.jsonl"))
        .unwrap()
        .lines()
        .map(|l| serde_json::from_str(l).unwrap())
        .collect()
}

pub fn welch_cases() -> Vec<WelchCase> {
    serde_json::from_str(&fs::read_to_string(fixture("welch_50.json")).unwrap()).unwrap()
}

pub fn correlation_cases() -> Vec<CorrelationCase> {
    serde_json::from_str(&fs::read_to_string(fixture("correlations_40.json")).unwrap()).unwrap()
}

/// Small dimensions used by every training test.
pub fn small_dims() -> ModelDims {
    ModelDims {
        word_dim: 16,
        char_dim: 8,
        char_hidden: 16,
        sentence_dim: 32,
        classifier_hidden: 16,
    }
}

/// Writes `train.jsonl` and `dev.jsonl` built from the separable fixture.
pub fn write_nli_dir(dir: &Path, n_train: usize, n_dev: usize) {
    fs::create_dir_all(dir).unwrap();
    fs::write(dir.join("train.jsonl"), nli_jsonl(&overfit_fixture(n_train, 0))).unwrap();
    fs::write(dir.join("dev.jsonl"), nli_jsonl(&overfit_fixture(n_dev, 1))).unwrap();
}

/// Every file below `dir`, relative to it, sorted.
pub fn tree(dir: &Path) -> Vec<PathBuf> {
    fn walk(root: &Path, dir: &Path, out: &mut Vec<PathBuf>) {
        for e in fs::read_dir(dir).unwrap() {
            let p = e.unwrap().path();
            if p.is_dir() {
                walk(root, &p, out);
            } else {
                out.push(p.strip_prefix(root).unwrap().to_path_buf());
            }
        }
    }
    let mut out = Vec::new();
    if dir.exists() {
        walk(dir, dir, &mut out);
    }
    out.sort();
    out
}
