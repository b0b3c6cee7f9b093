//! Train on an NLI directory (`train.jsonl`, `dev.jsonl`), write the best
//! checkpoint and check that reloading it reproduces validation accuracy.
//! Without a data directory a synthetic Zipfian corpus is used, with the word
//! table started from co-occurrence vectors of its training sentences.
//!
//!     cargo run --release --example train_nli -- [method] [data_dir] [out_dir]

use std::path::PathBuf;

use wordgate::checkpoint::load_model;
use wordgate::combinators::CombinationMethod;
use wordgate::data::synthetic::{zipf_corpus, ZipfConfig};
use wordgate::data::{cooccurrence_embeddings, load_nli};
use wordgate::model::ModelDims;
use wordgate::rng::SeededRng;
use wordgate::trainer::{evaluate_accuracy, train_one, TrainConfig, TrainData};

fn main() -> wordgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let method: CombinationMethod = args.next().as_deref().unwrap_or("sg").parse()?;
    let dims = ModelDims {
        word_dim: 24,
        char_dim: 8,
        char_hidden: 24,
        sentence_dim: 48,
        classifier_hidden: 24,
    };
    let (data, min_freq) = match args.next() {
        Some(dir) => {
            let dir = PathBuf::from(dir);
            let (train, dev) = (
                load_nli(dir.join("train.jsonl"), false)?,
                load_nli(dir.join("dev.jsonl"), false)?,
            );
            (TrainData::new(train, dev, 2), 2)
        }
        None => {
            let corpus = zipf_corpus(&ZipfConfig::default());
            let mut data = TrainData::new(corpus.train.clone(), corpus.dev.clone(), 1);
            let vectors = cooccurrence_embeddings(
                &corpus.train_sentences(),
                &data.word_vocab,
                dims.word_dim,
                1.0,
                &mut SeededRng::derived(1, 2),
            )?;
            data.embeddings = Some(vectors);
            (data, 1)
        }
    };
    let out = args
        .map(PathBuf::from)
        .next()
        .unwrap_or_else(|| std::env::temp_dir().join("wordgate-train-nli"));
    let config = TrainConfig {
        method,
        max_epochs: 20,
        min_freq,
        dims,
        ..TrainConfig::default()
    };
    println!(
        "{} train / {} dev pairs, {} words, {} chars",
        data.train.len(),
        data.dev.len(),
        data.word_vocab.len(),
        data.char_vocab.len()
    );
    let run = train_one(&config, &data, 1, Some(&out))?;
    print!("{}", run.state.log_csv());
    let ckpt = out.join("best.ckpt");
    let reloaded = evaluate_accuracy(&load_model(&ckpt)?, &data.dev)?;
    println!(
        "best val acc {} at epoch {}; reloaded {} from {}",
        run.state.best_val_acc,
        run.state.best_epoch,
        reloaded,
        ckpt.display()
    );
    assert_eq!(reloaded, run.state.best_val_acc);
    Ok(())
}
