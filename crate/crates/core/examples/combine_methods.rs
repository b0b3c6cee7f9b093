//! Word representations under every combination method, for a word in the
//! vocabulary and one outside it. Models are freshly initialised.
//!
//!     cargo run --example combine_methods -- [word] [unknown_word]

use wordgate::char_encoder::CharVocab;
use wordgate::combinators::CombinationMethod;
use wordgate::data::WordVocab;
use wordgate::model::{Model, ModelDims};
use wordgate::rng::SeededRng;

fn main() -> wordgate::Result<()> {
    let mut args = std::env::args().skip(1);
    let known = args.next().unwrap_or_else(|| "river".to_string());
    let unknown = args.next().unwrap_or_else(|| "riverbank".to_string());
    let corpus = [known.as_str(), "the", "a", "boat", "on", "river"];
    let words = WordVocab::build(corpus, 1);
    let chars = CharVocab::build(corpus.iter().copied().chain([unknown.as_str()]));
    let dims = ModelDims {
        word_dim: 6,
        char_dim: 4,
        char_hidden: 6,
        sentence_dim: 8,
        classifier_hidden: 4,
    };
    for method in CombinationMethod::ALL {
        let model = Model::new(
            method,
            dims,
            words.clone(),
            chars.clone(),
            false,
            None,
            &mut SeededRng::new(3),
        )?;
        println!("{} ({} parameters)", method.abbrev(), model.num_parameters());
        for w in [&known, &unknown] {
            let v = model.word_representation(w)?;
            let shown: Vec<String> = v.data().iter().map(|x| format!("{x:+.4}")).collect();
            println!("  {w:<12} [{}]", shown.join(" "));
            if method.is_gate() {
                let g = model.gate_for_word(w)?;
                let shown: Vec<String> = g.data().iter().map(|x| format!("{x:.4}")).collect();
                println!("  {:<12} gate [{}]", "", shown.join(" "));
            }
        }
    }
    Ok(())
}
