//! Character-level word vectors.
//!
//! A word's characters are looked up in a trainable table, run through a
//! BiLSTM, and the last forward state and first backward state (each
//! direction's final output) are linearly projected back to the hidden size:
//! `v_c = W_c [h_fw(m); h_bw(1)] + b_c`.

use std::collections::BTreeMap;

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::tensor::Tensor;

pub use crate::lstm::{bilstm, bilstm_matrix, lstm_step, BoundLstm, LstmWeights};

/// Character vocabulary. Index 0 is reserved for unseen characters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CharVocab {
    index_to_char: Vec<char>,
    char_to_index: BTreeMap<char, usize>,
}

impl CharVocab {
    pub const UNK: usize = 0;
    /// Placeholder stored at the UNK slot of `index_to_char`.
    const UNK_CHAR: char = '\u{FFFD}';

    /// Every character observed in `words`, in code-point order after UNK.
    pub fn build<'w>(words: impl IntoIterator<Item = &'w str>) -> Self {
        let mut seen = std::collections::BTreeSet::new();
        for w in words {
            seen.extend(w.chars());
        }
        seen.remove(&Self::UNK_CHAR);
        Self::from_chars(seen)
    }

    /// Vocabulary with UNK followed by `chars` in the given order.
    pub fn from_chars(chars: impl IntoIterator<Item = char>) -> Self {
        let mut index_to_char = vec![Self::UNK_CHAR];
        index_to_char.extend(chars.into_iter().filter(|&c| c != Self::UNK_CHAR));
        let char_to_index = index_to_char.iter().enumerate().skip(1).map(|(i, &c)| (c, i)).collect();
        Self {
            index_to_char,
            char_to_index,
        }
    }

    pub fn index(&self, c: char) -> usize {
        self.char_to_index.get(&c).copied().unwrap_or(Self::UNK)
    }

    pub fn char_at(&self, index: usize) -> Option<char> {
        (index != Self::UNK)
            .then(|| self.index_to_char.get(index).copied())
            .flatten()
    }

    /// `|C|`, including the UNK slot.
    pub fn len(&self) -> usize {
        self.index_to_char.len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() <= 1
    }

    pub fn indices(&self, word: &str) -> Vec<usize> {
        word.chars().map(|c| self.index(c)).collect()
    }

    pub fn chars(&self) -> &[char] {
        &self.index_to_char[1..]
    }
}

/// Trainable parameters of the character encoder.
#[derive(Clone, Debug, PartialEq)]
pub struct CharEncoderParams {
    /// `[|C|, d_r]`
    pub embeddings: Tensor,
    pub fw: LstmWeights,
    pub bw: LstmWeights,
    /// `[d_h, 2 d_h]`
    pub proj_w: Tensor,
    /// `[d_h]`
    pub proj_b: Tensor,
}

impl CharEncoderParams {
    pub fn init(vocab_size: usize, char_dim: usize, hidden: usize, rng: &mut SeededRng) -> Self {
        Self {
            embeddings: rng.init_tensor(&[vocab_size, char_dim]),
            fw: LstmWeights::init(char_dim, hidden, rng),
            bw: LstmWeights::init(char_dim, hidden, rng),
            proj_w: rng.init_tensor(&[hidden, 2 * hidden]),
            proj_b: rng.init_tensor(&[hidden]),
        }
    }

    pub fn char_dim(&self) -> usize {
        self.embeddings.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.proj_b.len()
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        let mut out = vec![&self.embeddings];
        out.extend(self.fw.tensors());
        out.extend(self.bw.tensors());
        out.push(&self.proj_w);
        out.push(&self.proj_b);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = vec![&mut self.embeddings];
        out.extend(self.fw.tensors_mut());
        out.extend(self.bw.tensors_mut());
        out.push(&mut self.proj_w);
        out.push(&mut self.proj_b);
        out
    }

    pub fn bind<'a>(&'a self, tape: &mut Tape<'a>) -> BoundCharEncoder {
        BoundCharEncoder {
            embeddings: tape.param(&self.embeddings),
            fw: self.fw.bind(tape),
            bw: self.bw.bind(tape),
            proj_w: tape.param(&self.proj_w),
            proj_b: tape.param(&self.proj_b),
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BoundCharEncoder {
    pub embeddings: Var,
    pub fw: BoundLstm,
    pub bw: BoundLstm,
    pub proj_w: Var,
    pub proj_b: Var,
}

/// Looks up each character of `word`, producing the `[m, d_r]` matrix of rows.
pub fn embed_chars(tape: &mut Tape<'_>, word: &str, enc: &BoundCharEncoder, vocab: &CharVocab) -> Result<Var> {
    if word.is_empty() {
        return Err(Error::invalid("cannot embed the characters of an empty word"));
    }
    tape.gather_rows(enc.embeddings, &vocab.indices(word))
}

/// Projects the final states of both directions:
/// `W_c [last row of fw ; first row of bw] + b_c`.
pub fn aggregate(tape: &mut Tape<'_>, h_fw: &[Var], h_bw: &[Var], proj_w: Var, proj_b: Var) -> Result<Var> {
    let (Some(&last_fw), Some(&first_bw)) = (h_fw.last(), h_bw.first()) else {
        return Err(Error::invalid("aggregate needs non-empty forward and backward states"));
    };
    let joined = tape.concat(&[last_fw, first_bw])?;
    let projected = tape.matvec(proj_w, joined)?;
    tape.add(projected, proj_b)
}

/// Full character pipeline for one word: lookup, BiLSTM, aggregation.
pub fn encode_word(tape: &mut Tape<'_>, word: &str, enc: &BoundCharEncoder, vocab: &CharVocab) -> Result<Var> {
    let chars = embed_chars(tape, word, enc, vocab)?;
    let (fw, bw) = bilstm_matrix(tape, chars, &enc.fw, &enc.bw)?;
    aggregate(tape, &fw, &bw, enc.proj_w, enc.proj_b)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn two_char_encoder() -> (CharVocab, CharEncoderParams) {
        let vocab = CharVocab::from_chars(['a', 'b']);
        let mut rng = SeededRng::new(0);
        let mut params = CharEncoderParams::init(vocab.len(), 2, 2, &mut rng);
        params.embeddings = Tensor::from_rows(&[vec![9.0, 9.0], vec![1.0, 0.0], vec![0.0, 1.0]]).unwrap();
        (vocab, params)
    }

    #[test]
    fn lookup_rows() {
        let (vocab, params) = two_char_encoder();
        let mut tape = Tape::new();
        let enc = params.bind(&mut tape);
        let m = embed_chars(&mut tape, "ab", &enc, &vocab).unwrap();
        assert_eq!(tape.value(m).data(), &[1.0, 0.0, 0.0, 1.0]);
        let m = embed_chars(&mut tape, "aaa", &enc, &vocab).unwrap();
        assert_eq!(tape.value(m).data(), &[1.0, 0.0, 1.0, 0.0, 1.0, 0.0]);
    }

    #[test]
    fn unseen_char_uses_unk_row() {
        let (vocab, params) = two_char_encoder();
        let mut tape = Tape::new();
        let enc = params.bind(&mut tape);
        let m = embed_chars(&mut tape, "az", &enc, &vocab).unwrap();
        assert_eq!(tape.value(m).data(), &[1.0, 0.0, 9.0, 9.0]);
        assert_eq!(vocab.index('z'), CharVocab::UNK);
    }

    #[test]
    fn empty_word_is_rejected() {
        let (vocab, params) = two_char_encoder();
        let mut tape = Tape::new();
        let enc = params.bind(&mut tape);
        assert!(embed_chars(&mut tape, "", &enc, &vocab).is_err());
    }

    #[test]
    fn aggregate_scalar_arithmetic() {
        let mut tape = Tape::new();
        let fw = tape.constant(Tensor::vector(vec![0.3]).unwrap());
        let bw = tape.constant(Tensor::vector(vec![0.5]).unwrap());
        let w = tape.constant(Tensor::matrix(1, 2, vec![1.0, 1.0]).unwrap());
        let b = tape.constant(Tensor::vector(vec![0.0]).unwrap());
        let v = aggregate(&mut tape, &[fw], &[bw], w, b).unwrap();
        assert!((tape.value(v).item() - 0.8).abs() < 1e-15);
    }

    #[test]
    fn zero_projection_returns_bias() {
        let mut tape = Tape::new();
        let fw = tape.constant(Tensor::vector(vec![0.3, -1.0]).unwrap());
        let bw = tape.constant(Tensor::vector(vec![0.5, 2.0]).unwrap());
        let w = tape.constant(Tensor::zeros(&[2, 4]));
        let b = tape.constant(Tensor::vector(vec![0.25, -4.0]).unwrap());
        let v = aggregate(&mut tape, &[fw], &[bw], w, b).unwrap();
        assert_eq!(tape.value(v).data(), &[0.25, -4.0]);
    }

    #[test]
    fn aggregate_shape_mismatch() {
        let mut tape = Tape::new();
        let fw = tape.constant(Tensor::vector(vec![0.3]).unwrap());
        let bw = tape.constant(Tensor::vector(vec![0.5]).unwrap());
        let w = tape.constant(Tensor::zeros(&[1, 3]));
        let b = tape.constant(Tensor::vector(vec![0.0]).unwrap());
        assert!(aggregate(&mut tape, &[fw], &[bw], w, b).is_err());
    }

    #[test]
    fn output_dimension_is_hidden_size() {
        let vocab = CharVocab::build(["hello", "world"]);
        let mut rng = SeededRng::new(4);
        let params = CharEncoderParams::init(vocab.len(), 5, 7, &mut rng);
        let mut tape = Tape::new();
        let enc = params.bind(&mut tape);
        for w in ["h", "hello", "zzz", "wörld"] {
            let v = encode_word(&mut tape, w, &enc, &vocab).unwrap();
            assert_eq!(tape.value(v).shape(), &[7]);
        }
    }
}
