//! The end-to-end NLI model: word lookup and/or character encoder, a
//! combination method, the sentence encoder and the classification head.

use std::collections::HashMap;

use crate::autodiff::{Gradients, ParamId, Tape, Var};
use crate::char_encoder::{encode_word, BoundCharEncoder, CharEncoderParams, CharVocab};
use crate::combinators::{combine, gate_value, BoundGate, CombinationMethod, GateParams};
use crate::data::{NliExample, WordVocab};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::sentence_encoder::{encode_sentence, nli_forward, BoundSentenceEncoder, SentenceEncoderParams};
use crate::tensor::Tensor;

/// Layer widths.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ModelDims {
    /// Word embedding width `d`.
    pub word_dim: usize,
    /// Character embedding width `d_r`.
    pub char_dim: usize,
    /// Character BiLSTM width per direction `d_h`, also the width of `v_c`.
    pub char_hidden: usize,
    /// Pooled sentence width `d_s` (half per direction).
    pub sentence_dim: usize,
    pub classifier_hidden: usize,
}

impl Default for ModelDims {
    fn default() -> Self {
        Self {
            word_dim: 300,
            char_dim: 50,
            char_hidden: 300,
            sentence_dim: 4096,
            classifier_hidden: 512,
        }
    }
}

impl ModelDims {
    /// Width of each combined word vector fed to the sentence encoder.
    pub fn sentence_input(&self, method: CombinationMethod) -> usize {
        match method {
            CombinationMethod::WordOnly => self.word_dim,
            CombinationMethod::CharOnly => self.char_hidden,
            m => m.output_dim(self.word_dim),
        }
    }

    pub fn validate(&self, method: CombinationMethod) -> Result<()> {
        let all = [
            self.word_dim,
            self.char_dim,
            self.char_hidden,
            self.sentence_dim,
            self.classifier_hidden,
        ];
        if all.contains(&0) {
            return Err(Error::invalid("model dimensions must be positive"));
        }
        if !self.sentence_dim.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "sentence_dim must be even, got {}",
                self.sentence_dim
            )));
        }
        let needs_both = method.uses_words() && method.uses_chars();
        if needs_both && self.word_dim != self.char_hidden {
            return Err(Error::invalid(format!(
                "method `{method}` needs word_dim ({}) == char_hidden ({})",
                self.word_dim, self.char_hidden
            )));
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct ModelParams {
    /// `[|W|, d]`, present when the method reads word vectors.
    pub word_embeddings: Option<Tensor>,
    pub char_encoder: Option<CharEncoderParams>,
    pub gate: Option<GateParams>,
    pub sentence: SentenceEncoderParams,
}

#[derive(Clone, Debug, PartialEq)]
pub struct Model {
    pub method: CombinationMethod,
    pub dims: ModelDims,
    pub word_vocab: WordVocab,
    pub char_vocab: CharVocab,
    /// Whether the vocabularies were built from lowercased text.
    pub lowercase: bool,
    pub params: ModelParams,
}

impl Model {
    /// Fresh model with every tensor drawn from `(-0.05, 0.05)`. Pass
    /// `word_table` to start from pretrained vectors instead.
    pub fn new(
        method: CombinationMethod,
        dims: ModelDims,
        word_vocab: WordVocab,
        char_vocab: CharVocab,
        lowercase: bool,
        word_table: Option<Tensor>,
        rng: &mut SeededRng,
    ) -> Result<Self> {
        dims.validate(method)?;
        let word_embeddings = if method.uses_words() {
            let table = match word_table {
                Some(t) => {
                    if t.shape() != [word_vocab.len(), dims.word_dim] {
                        return Err(Error::shape(
                            "word embeddings",
                            t.shape(),
                            &[word_vocab.len(), dims.word_dim],
                        ));
                    }
                    t
                }
                None => rng.init_tensor(&[word_vocab.len(), dims.word_dim]),
            };
            Some(table)
        } else {
            None
        };
        let char_encoder = method
            .uses_chars()
            .then(|| CharEncoderParams::init(char_vocab.len(), dims.char_dim, dims.char_hidden, rng));
        let gate = GateParams::init(method, dims.word_dim, rng);
        let sentence = SentenceEncoderParams::init(
            dims.sentence_input(method),
            dims.sentence_dim,
            dims.classifier_hidden,
            rng,
        )?;
        Ok(Self {
            method,
            dims,
            word_vocab,
            char_vocab,
            lowercase,
            params: ModelParams {
                word_embeddings,
                char_encoder,
                gate,
                sentence,
            },
        })
    }

    /// Every trainable tensor with a stable name, in binding order.
    pub fn named_tensors(&self) -> Vec<(String, &Tensor)> {
        let mut out = Vec::new();
        let p = &self.params;
        if let Some(t) = &p.word_embeddings {
            out.push(("word.embeddings".to_string(), t));
        }
        if let Some(c) = &p.char_encoder {
            let names = [
                "embeddings",
                "fw.w_ih",
                "fw.w_hh",
                "fw.bias",
                "bw.w_ih",
                "bw.w_hh",
                "bw.bias",
                "proj_w",
                "proj_b",
            ];
            out.extend(names.iter().map(|n| format!("char.{n}")).zip(c.tensors()));
        }
        if let Some(g) = &p.gate {
            out.extend(["gate.w", "gate.b"].iter().map(|n| n.to_string()).zip(g.tensors()));
        }
        let names = [
            "sent.fw.w_ih",
            "sent.fw.w_hh",
            "sent.fw.bias",
            "sent.bw.w_ih",
            "sent.bw.w_hh",
            "sent.bw.bias",
            "head.w1",
            "head.b1",
            "head.w2",
            "head.b2",
        ];
        out.extend(names.iter().map(|n| n.to_string()).zip(p.sentence.tensors()));
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let p = &mut self.params;
        let mut out = Vec::new();
        if let Some(t) = &mut p.word_embeddings {
            out.push(t);
        }
        if let Some(c) = &mut p.char_encoder {
            out.extend(c.tensors_mut());
        }
        if let Some(g) = &mut p.gate {
            out.extend(g.tensors_mut());
        }
        out.extend(p.sentence.tensors_mut());
        out
    }

    pub fn num_parameters(&self) -> usize {
        self.named_tensors().iter().map(|(_, t)| t.len()).sum()
    }

    /// Plain SGD step `θ ← θ - lr ∇θ`.
    pub fn sgd_step(&mut self, grads: &Gradients, lr: f64) -> Result<()> {
        for (i, t) in self.tensors_mut().into_iter().enumerate() {
            let g = grads
                .get(ParamId(i))
                .ok_or_else(|| Error::invalid(format!("no gradient for parameter {i}")))?;
            if g.shape() != t.shape() {
                return Err(Error::shape("sgd_step", t.shape(), g.shape()));
            }
            t.axpy(-lr, g);
        }
        Ok(())
    }

    /// Registers every parameter on `tape` and returns a forward context.
    pub fn bind<'a>(&'a self, tape: &mut Tape<'a>) -> Forward<'a> {
        let p = &self.params;
        let words = p.word_embeddings.as_ref().map(|t| tape.param(t));
        let chars = p.char_encoder.as_ref().map(|c| c.bind(tape));
        let gate = p.gate.as_ref().map(|g| g.bind(tape));
        let sentence = p.sentence.bind(tape);
        Forward {
            model: self,
            words,
            chars,
            gate,
            sentence,
            cache: HashMap::new(),
        }
    }

    fn normalize<'w>(&self, word: &'w str) -> std::borrow::Cow<'w, str> {
        if self.lowercase {
            std::borrow::Cow::Owned(word.to_lowercase())
        } else {
            std::borrow::Cow::Borrowed(word)
        }
    }

    /// Final word representation `v` for a single word.
    pub fn word_representation(&self, word: &str) -> Result<Tensor> {
        let mut tape = Tape::new();
        let mut fwd = self.bind(&mut tape);
        let v = fwd.word(&mut tape, word)?;
        Ok(tape.value(v).clone())
    }

    /// Gate activation for `word` (gate methods only).
    pub fn gate_for_word(&self, word: &str) -> Result<Tensor> {
        if !self.method.is_gate() {
            return Err(Error::invalid(format!("method `{}` has no gate", self.method)));
        }
        let mut tape = Tape::new();
        let mut fwd = self.bind(&mut tape);
        let g = fwd.gate(&mut tape, word)?;
        Ok(tape.value(g).clone())
    }

    pub fn encode_sentence(&self, tokens: &[String]) -> Result<Tensor> {
        let mut tape = Tape::new();
        let mut fwd = self.bind(&mut tape);
        let s = fwd.sentence(&mut tape, tokens)?;
        Ok(tape.value(s).clone())
    }

    pub fn logits(&self, ex: &NliExample) -> Result<Tensor> {
        let mut tape = Tape::new();
        let mut fwd = self.bind(&mut tape);
        let z = fwd.logits(&mut tape, ex)?;
        Ok(tape.value(z).clone())
    }

    /// Predicted class index; ties go to the lowest index.
    pub fn predict(&self, ex: &NliExample) -> Result<usize> {
        Ok(argmax(self.logits(ex)?.data()))
    }
}

pub(crate) fn argmax(xs: &[f64]) -> usize {
    let mut best = 0;
    for (i, &x) in xs.iter().enumerate() {
        if x > xs[best] {
            best = i;
        }
    }
    best
}

/// A model bound to one tape. Word representations are memoised per tape so
/// repeated words in a batch share one subgraph.
pub struct Forward<'a> {
    model: &'a Model,
    words: Option<Var>,
    chars: Option<BoundCharEncoder>,
    gate: Option<BoundGate>,
    sentence: BoundSentenceEncoder,
    cache: HashMap<String, (Var, Option<Var>)>,
}

impl<'a> Forward<'a> {
    pub fn model(&self) -> &'a Model {
        self.model
    }

    fn word_vector(&self, tape: &mut Tape<'_>, word: &str) -> Result<Var> {
        let table = self
            .words
            .ok_or_else(|| Error::invalid("model has no word embeddings"))?;
        let idx = self.model.word_vocab.index(word);
        let rows = tape.gather_rows(table, &[idx])?;
        tape.row(rows, 0)
    }

    fn char_vector(&self, tape: &mut Tape<'_>, word: &str) -> Result<Var> {
        let enc = self
            .chars
            .as_ref()
            .ok_or_else(|| Error::invalid("model has no character encoder"))?;
        encode_word(tape, word, enc, &self.model.char_vocab)
    }

    fn represent(&mut self, tape: &mut Tape<'_>, word: &str) -> Result<(Var, Option<Var>)> {
        let word = self.model.normalize(word);
        if let Some(&hit) = self.cache.get(word.as_ref()) {
            return Ok(hit);
        }
        let method = self.model.method;
        let out = match method {
            CombinationMethod::WordOnly => (self.word_vector(tape, &word)?, None),
            CombinationMethod::CharOnly => (self.char_vector(tape, &word)?, None),
            _ => {
                let v_w = self.word_vector(tape, &word)?;
                let v_c = self.char_vector(tape, &word)?;
                let c = combine(tape, method, v_w, v_c, self.gate.as_ref())?;
                (c.v, c.gate)
            }
        };
        self.cache.insert(word.into_owned(), out);
        Ok(out)
    }

    /// Combined representation of `word`.
    pub fn word(&mut self, tape: &mut Tape<'_>, word: &str) -> Result<Var> {
        Ok(self.represent(tape, word)?.0)
    }

    /// Gate of `word`, computed from its word vector alone.
    pub fn gate(&mut self, tape: &mut Tape<'_>, word: &str) -> Result<Var> {
        if let (_, Some(g)) = self.represent(tape, word)? {
            return Ok(g);
        }
        let word = self.model.normalize(word);
        let v_w = self.word_vector(tape, &word)?;
        gate_value(tape, self.model.method, v_w, self.gate.as_ref())
    }

    pub fn sentence(&mut self, tape: &mut Tape<'_>, tokens: &[String]) -> Result<Var> {
        let rows = tokens.iter().map(|t| self.word(tape, t)).collect::<Result<Vec<_>>>()?;
        encode_sentence(tape, &rows, &self.sentence)
    }

    pub fn logits(&mut self, tape: &mut Tape<'_>, ex: &NliExample) -> Result<Var> {
        let u = self.sentence(tape, &ex.premise)?;
        let v = self.sentence(tape, &ex.hypothesis)?;
        nli_forward(tape, u, v, &self.sentence.head)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::synthetic::overfit_fixture;

    fn small(method: CombinationMethod) -> Model {
        let data = overfit_fixture(12, 0);
        let vocab = WordVocab::build(data.iter().flat_map(|e| e.tokens()), 1);
        let chars = CharVocab::build(data.iter().flat_map(|e| e.tokens()));
        let dims = ModelDims {
            word_dim: 4,
            char_dim: 3,
            char_hidden: 4,
            sentence_dim: 6,
            classifier_hidden: 5,
        };
        Model::new(method, dims, vocab, chars, false, None, &mut SeededRng::new(1)).unwrap()
    }

    #[test]
    fn every_method_produces_logits() {
        let ex = &overfit_fixture(3, 0)[0];
        for m in CombinationMethod::ALL {
            let model = small(m);
            let z = model.logits(ex).unwrap();
            assert_eq!(z.shape(), &[3]);
            let expected_in = if m == CombinationMethod::Concat { 8 } else { 4 };
            assert_eq!(model.params.sentence.input_dim(), expected_in);
        }
    }

    #[test]
    fn gate_dims_must_agree() {
        let dims = ModelDims {
            word_dim: 4,
            char_hidden: 5,
            ..ModelDims::default()
        };
        assert!(dims.validate(CombinationMethod::VectorGate).is_err());
        assert!(dims.validate(CombinationMethod::WordOnly).is_ok());
    }

    #[test]
    fn oov_word_still_representable() {
        let model = small(CombinationMethod::VectorGate);
        let v = model.word_representation("qqqxyz").unwrap();
        assert_eq!(v.shape(), &[4]);
    }

    #[test]
    fn gradients_cover_every_tensor() {
        let model = small(CombinationMethod::ScalarGate);
        let ex = &overfit_fixture(3, 0)[1];
        let mut tape = Tape::new();
        let mut fwd = model.bind(&mut tape);
        let z = fwd.logits(&mut tape, ex).unwrap();
        let loss = tape.cross_entropy(z, ex.label.index()).unwrap();
        let grads = tape.backward(loss).unwrap();
        assert_eq!(grads.len(), model.named_tensors().len());
        let mut m2 = model.clone();
        m2.sgd_step(&grads, 0.1).unwrap();
        assert_ne!(m2, model);
    }

    #[test]
    fn argmax_ties_pick_lowest() {
        assert_eq!(argmax(&[0.0, 0.0, 0.0]), 0);
        assert_eq!(argmax(&[0.0, 1.0, 1.0]), 1);
    }
}
