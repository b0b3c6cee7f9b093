//! Word-similarity evaluation: cosine of the final word vectors against
//! human scores, reported as Pearson and Spearman x100.
//!
//!     cargo run --release --example word_similarity -- <checkpoint> <pairs.tsv>...
//!
//! Without arguments a small vector-gate model is trained on the synthetic
//! fixture and scored on a made-up pair list.

use wordgate::checkpoint::load_model;
use wordgate::combinators::CombinationMethod;
use wordgate::data::synthetic::overfit_fixture;
use wordgate::data::{load_wordsim, parse_wordsim, WordSimOptions, WordSimPair};
use wordgate::eval_word::evaluate_wordsim;
use wordgate::model::{Model, ModelDims};
use wordgate::trainer::{train_one, TrainConfig, TrainData};

const TOY_PAIRS: &str = "yes\ttrue\t9.1\nno\tnever\t8.7\nmaybe\tperhaps\t8.9\nyes\tno\t1.5\ntrue\tnever\t1.2\n\
cat\tdog\t6.0\nsun\tsea\t3.5\ntom\tann\t5.0\nred\tbig\t2.1\nyes\tyess\t8.0\n";

fn toy_model() -> wordgate::Result<Model> {
    let pairs = overfit_fixture(64, 0);
    let config = TrainConfig {
        method: CombinationMethod::VectorGate,
        max_epochs: 20,
        min_freq: 1,
        dims: ModelDims {
            word_dim: 8,
            char_dim: 6,
            char_hidden: 8,
            sentence_dim: 16,
            classifier_hidden: 8,
        },
        ..TrainConfig::default()
    };
    Ok(train_one(&config, &TrainData::new(pairs.clone(), pairs, 1), 1, None)?.best_model)
}

fn main() -> wordgate::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let (model, sets): (Model, Vec<(String, Vec<WordSimPair>)>) = if args.len() >= 2 {
        let sets = args[1..]
            .iter()
            .map(|p| Ok((p.clone(), load_wordsim(p, WordSimOptions::default())?)))
            .collect::<wordgate::Result<_>>()?;
        (load_model(&args[0])?, sets)
    } else {
        let pairs = parse_wordsim(TOY_PAIRS, "toy".as_ref(), WordSimOptions::default())?;
        (toy_model()?, vec![("toy".to_string(), pairs)])
    };
    println!("dataset,n_pairs,pearson_x100,spearman_x100,coverage");
    for (name, pairs) in &sets {
        let r = evaluate_wordsim(&model, name, pairs)?;
        println!(
            "{},{},{:.2},{:.2},{:.3}",
            r.dataset, r.n_pairs, r.pearson_x100, r.spearman_x100, r.coverage
        );
        if !r.oov_note.is_empty() {
            println!("# {}", r.oov_note);
        }
    }
    Ok(())
}
