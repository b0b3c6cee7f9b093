//! Tokenization, vocabularies, pretrained vectors and dataset readers.

mod embeddings;
mod nli;
pub mod synthetic;
mod tokenize;
mod vocab;
mod wordsim;

pub use embeddings::{cooccurrence_embeddings, load_embeddings, PretrainedEmbeddings};
pub use nli::{load_nli, nli_jsonl, NliExample, NliLabel};
pub use tokenize::tokenize;
pub use vocab::{WordVocab, PAD, UNK};
pub use wordsim::{load_wordsim, parse_wordsim, WordSimOptions, WordSimPair};
