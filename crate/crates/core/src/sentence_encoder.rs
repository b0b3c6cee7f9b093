//! BiLSTM + max-pooling sentence encoder and the NLI classification head.

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::lstm::{bilstm, BoundLstm, LstmWeights};
use crate::rng::SeededRng;
use crate::tensor::Tensor;

/// Entailment, neutral, contradiction.
pub const NUM_CLASSES: usize = 3;

/// Two-layer head over `[u ; v ; |u - v| ; u ⊙ v]`.
#[derive(Clone, Debug, PartialEq)]
pub struct ClassifierParams {
    /// `[hidden, 4 d_s]`
    pub w1: Tensor,
    /// `[hidden]`
    pub b1: Tensor,
    /// `[3, hidden]`
    pub w2: Tensor,
    /// `[3]`
    pub b2: Tensor,
}

impl ClassifierParams {
    pub fn init(sentence_dim: usize, hidden: usize, rng: &mut SeededRng) -> Self {
        Self {
            w1: rng.init_tensor(&[hidden, 4 * sentence_dim]),
            b1: rng.init_tensor(&[hidden]),
            w2: rng.init_tensor(&[NUM_CLASSES, hidden]),
            b2: rng.init_tensor(&[NUM_CLASSES]),
        }
    }

    pub fn zeros(sentence_dim: usize, hidden: usize) -> Self {
        Self {
            w1: Tensor::zeros(&[hidden, 4 * sentence_dim]),
            b1: Tensor::zeros(&[hidden]),
            w2: Tensor::zeros(&[NUM_CLASSES, hidden]),
            b2: Tensor::zeros(&[NUM_CLASSES]),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct SentenceEncoderParams {
    /// Forward direction, hidden size `d_s / 2`.
    pub fw: LstmWeights,
    /// Backward direction, hidden size `d_s / 2`.
    pub bw: LstmWeights,
    pub classifier: ClassifierParams,
}

impl SentenceEncoderParams {
    /// `sentence_dim` is the pooled width `d_s`, split evenly across directions.
    pub fn init(input: usize, sentence_dim: usize, classifier_hidden: usize, rng: &mut SeededRng) -> Result<Self> {
        if sentence_dim == 0 || !sentence_dim.is_multiple_of(2) {
            return Err(Error::invalid(format!(
                "sentence dimension must be even, got {sentence_dim}"
            )));
        }
        let half = sentence_dim / 2;
        Ok(Self {
            fw: LstmWeights::init(input, half, rng),
            bw: LstmWeights::init(input, half, rng),
            classifier: ClassifierParams::init(sentence_dim, classifier_hidden, rng),
        })
    }

    pub fn sentence_dim(&self) -> usize {
        2 * self.fw.hidden_dim()
    }

    pub fn input_dim(&self) -> usize {
        self.fw.input_dim()
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        let mut out = self.fw.tensors();
        out.extend(self.bw.tensors());
        let c = &self.classifier;
        out.extend([&c.w1, &c.b1, &c.w2, &c.b2]);
        out
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        let mut out = self.fw.tensors_mut();
        out.extend(self.bw.tensors_mut());
        let c = &mut self.classifier;
        out.extend([&mut c.w1, &mut c.b1, &mut c.w2, &mut c.b2]);
        out
    }

    pub fn bind<'a>(&'a self, tape: &mut Tape<'a>) -> BoundSentenceEncoder {
        let fw = self.fw.bind(tape);
        let bw = self.bw.bind(tape);
        let c = &self.classifier;
        BoundSentenceEncoder {
            fw,
            bw,
            head: BoundClassifier {
                w1: tape.param(&c.w1),
                b1: tape.param(&c.b1),
                w2: tape.param(&c.w2),
                b2: tape.param(&c.b2),
            },
        }
    }
}

#[derive(Clone, Copy, Debug)]
pub struct BoundClassifier {
    pub w1: Var,
    pub b1: Var,
    pub w2: Var,
    pub b2: Var,
}

#[derive(Clone, Copy, Debug)]
pub struct BoundSentenceEncoder {
    pub fw: BoundLstm,
    pub bw: BoundLstm,
    pub head: BoundClassifier,
}

/// Columnwise max over the rows `S[i] = [fw_i ; bw_i]`.
pub fn encode_sentence(tape: &mut Tape<'_>, words: &[Var], enc: &BoundSentenceEncoder) -> Result<Var> {
    if words.is_empty() {
        return Err(Error::invalid("cannot encode an empty sentence"));
    }
    let (fw, bw) = bilstm(tape, words, &enc.fw, &enc.bw)?;
    let rows = fw
        .iter()
        .zip(&bw)
        .map(|(&f, &b)| tape.concat(&[f, b]))
        .collect::<Result<Vec<_>>>()?;
    max_pool(tape, &rows)
}

/// Max pooling over a sequence of equally sized vectors.
pub fn max_pool(tape: &mut Tape<'_>, rows: &[Var]) -> Result<Var> {
    let s = tape.stack_rows(rows)?;
    tape.max_rows(s)
}

/// `[u ; v ; |u - v| ; u ⊙ v]`.
pub fn pair_features(tape: &mut Tape<'_>, u: Var, v: Var) -> Result<Var> {
    let diff = tape.sub(u, v)?;
    let dist = tape.abs(diff);
    let prod = tape.mul(u, v)?;
    tape.concat(&[u, v, dist, prod])
}

/// Logits over (entailment, neutral, contradiction) for a premise/hypothesis pair.
pub fn nli_forward(tape: &mut Tape<'_>, premise: Var, hypothesis: Var, head: &BoundClassifier) -> Result<Var> {
    let (sp, sh) = (tape.value(premise).shape(), tape.value(hypothesis).shape());
    if sp != sh || sp.len() != 1 {
        return Err(Error::shape("nli_forward", sp, sh));
    }
    let features = pair_features(tape, premise, hypothesis)?;
    let hidden = tape.matvec(head.w1, features)?;
    let hidden = tape.add(hidden, head.b1)?;
    let hidden = tape.tanh(hidden);
    let logits = tape.matvec(head.w2, hidden)?;
    tape.add(logits, head.b2)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pooling_is_columnwise_max() {
        let mut tape = Tape::new();
        let a = tape.constant(Tensor::vector(vec![1.0, 5.0]).unwrap());
        let b = tape.constant(Tensor::vector(vec![3.0, 2.0]).unwrap());
        let s = max_pool(&mut tape, &[a, b]).unwrap();
        assert_eq!(tape.value(s).data(), &[3.0, 5.0]);
    }

    #[test]
    fn single_word_sentence_is_its_bilstm_row() {
        let mut rng = SeededRng::new(3);
        let params = SentenceEncoderParams::init(3, 4, 5, &mut rng).unwrap();
        let mut tape = Tape::new();
        let enc = params.bind(&mut tape);
        let x = tape.constant(Tensor::vector(vec![0.3, -0.2, 0.9]).unwrap());
        let s = encode_sentence(&mut tape, &[x], &enc).unwrap();
        let (fw, bw) = bilstm(&mut tape, &[x], &enc.fw, &enc.bw).unwrap();
        let row = tape.concat(&[fw[0], bw[0]]).unwrap();
        assert_eq!(tape.value(s), tape.value(row));
    }

    #[test]
    fn identical_inputs_zero_the_distance_block() {
        let mut tape = Tape::new();
        let u = tape.constant(Tensor::vector(vec![0.5, -1.5]).unwrap());
        let f = pair_features(&mut tape, u, u).unwrap();
        assert_eq!(&tape.value(f).data()[4..6], &[0.0, 0.0]);
    }

    #[test]
    fn zero_head_gives_uniform_logits() {
        let head = ClassifierParams::zeros(2, 4);
        let mut tape = Tape::new();
        let bound = BoundClassifier {
            w1: tape.param(&head.w1),
            b1: tape.param(&head.b1),
            w2: tape.param(&head.w2),
            b2: tape.param(&head.b2),
        };
        let u = tape.constant(Tensor::vector(vec![0.5, -1.5]).unwrap());
        let v = tape.constant(Tensor::vector(vec![2.0, 0.1]).unwrap());
        let logits = nli_forward(&mut tape, u, v, &bound).unwrap();
        assert_eq!(tape.value(logits).data(), &[0.0, 0.0, 0.0]);
    }

    #[test]
    fn errors() {
        let mut rng = SeededRng::new(3);
        assert!(SentenceEncoderParams::init(3, 5, 5, &mut rng).is_err());
        let params = SentenceEncoderParams::init(3, 4, 5, &mut rng).unwrap();
        let mut tape = Tape::new();
        let enc = params.bind(&mut tape);
        assert!(encode_sentence(&mut tape, &[], &enc).is_err());
        let u = tape.constant(Tensor::vector(vec![0.5; 4]).unwrap());
        let v = tape.constant(Tensor::vector(vec![0.5; 3]).unwrap());
        assert!(nli_forward(&mut tape, u, v, &enc.head).is_err());
    }
}
