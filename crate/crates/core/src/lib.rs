//! Word representations built from characters, word embeddings, or a gated
//! mix of both, trained end to end through a natural language inference
//! objective.

pub mod analysis;
pub mod autodiff;
pub mod char_encoder;
pub mod checkpoint;
pub mod cli;
pub mod combinators;
pub mod config;
pub mod data;
pub mod error;
pub mod eval_word;
pub mod gradcheck_suite;
pub mod lstm;
pub mod model;
pub mod probe;
pub mod rng;
pub mod sentence_encoder;
pub mod stats;
pub mod tensor;
pub mod trainer;

pub use error::{Error, Result};
pub use tensor::Tensor;
