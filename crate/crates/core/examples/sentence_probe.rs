//! Frozen sentence vectors under a linear probe or direct cosine similarity.
//!
//!     cargo run --release --example sentence_probe -- <checkpoint> <task.tsv> <cls|rel|sts> [dev.tsv]
//!
//! Without arguments a small model is trained on the synthetic fixture and
//! probed on a classification task built from its hypotheses. Its word
//! table starts from random vectors of GloVe-like magnitude.

use std::fmt::Write as _;
use std::path::Path;

use wordgate::checkpoint::load_model;
use wordgate::combinators::CombinationMethod;
use wordgate::data::synthetic::overfit_fixture;
use wordgate::data::PretrainedEmbeddings;
use wordgate::model::ModelDims;
use wordgate::probe::{
    evaluate_task, load_probe_task, parse_probe_task, ProbeKind, DEFAULT_PROBE_L2, PROBE_REPORT_HEADER,
};
use wordgate::rng::SeededRng;
use wordgate::trainer::{train_one, TrainConfig, TrainData};

fn main() -> wordgate::Result<()> {
    let args: Vec<String> = std::env::args().skip(1).collect();
    let report = if args.len() >= 3 {
        let kind: ProbeKind = args[2].parse()?;
        let model = load_model(&args[0])?;
        let task = load_probe_task(&args[1], kind)?;
        let dev = args.get(3).map(|p| load_probe_task(p, kind)).transpose()?;
        evaluate_task(&model, &task, dev.as_ref(), DEFAULT_PROBE_L2)?
    } else {
        let pairs = overfit_fixture(64, 0);
        let config = TrainConfig {
            method: CombinationMethod::ScalarGate,
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
        let mut data = TrainData::new(pairs.clone(), pairs, 1);
        let vectors = PretrainedEmbeddings::uniform(&data.word_vocab, 8, 0.7, &mut SeededRng::new(1));
        data.embeddings = Some(vectors);
        let model = train_one(&config, &data, 1, None)?.best_model;
        let mut tsv = String::new();
        for ex in overfit_fixture(100, 7) {
            let _ = writeln!(tsv, "{}\t{}", ex.label, ex.hypothesis.join(" "));
        }
        let task = parse_probe_task(
            "hypothesis-label",
            ProbeKind::Classification,
            &tsv,
            Path::new("generated"),
        )?;
        evaluate_task(&model, &task, None, DEFAULT_PROBE_L2)?
    };
    println!("{PROBE_REPORT_HEADER}\n{}", report.csv_row());
    Ok(())
}
