//! Memorise a 64-pair synthetic NLI set with every combination method.
//!
//!     cargo run --release --example overfit -- [seed] [word_range] [mean|sum]
//!
//! With `word_range` set, the word table starts from uniform vectors of that
//! half-width (0.7 is roughly the per-coordinate size of GloVe vectors)
//! instead of the default small init; 0 keeps the default.

use wordgate::combinators::CombinationMethod;
use wordgate::data::synthetic::overfit_fixture;
use wordgate::data::PretrainedEmbeddings;
use wordgate::model::ModelDims;
use wordgate::rng::SeededRng;
use wordgate::trainer::{train_one, LossReduction, TrainConfig, TrainData};

fn main() -> wordgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let seed: u64 = args.next().and_then(|s| s.parse().ok()).unwrap_or(1);
    let word_range: Option<f64> = args.next().and_then(|s| s.parse().ok()).filter(|r: &f64| *r > 0.0);
    let loss_reduction: LossReduction = args.next().map_or(Ok(LossReduction::default()), |s| s.parse())?;
    let dims = ModelDims {
        word_dim: 16,
        char_dim: 8,
        char_hidden: 16,
        sentence_dim: 32,
        classifier_hidden: 16,
    };
    let pairs = overfit_fixture(64, 0);
    let mut data = TrainData::new(pairs.clone(), pairs, 1);
    if let Some(r) = word_range {
        let mut rng = SeededRng::derived(seed, 2);
        data.embeddings = Some(PretrainedEmbeddings::uniform(
            &data.word_vocab,
            dims.word_dim,
            r,
            &mut rng,
        ));
    }
    for method in CombinationMethod::ALL {
        let config = TrainConfig {
            method,
            max_epochs: 200,
            min_freq: 1,
            target_val_acc: Some(1.0),
            dims,
            loss_reduction,
            ..TrainConfig::default()
        };
        let t = std::time::Instant::now();
        let run = train_one(&config, &data, seed, None)?;
        let last = run.state.log.last().expect("at least one epoch");
        println!(
            "{:>3}  epochs {:>3}  train acc {:.3}  loss {:.4}  lr {}  ({:.1?})",
            method.abbrev(),
            last.epoch,
            last.val_acc,
            last.train_loss,
            last.lr,
            t.elapsed()
        );
    }
    Ok(())
}
