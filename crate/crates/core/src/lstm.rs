//! LSTM cells and bidirectional recurrences on the tape.
//!
//! The cell is the standard formulation without peepholes:
//!
//! ```text
//! z = W_ih x + W_hh h_prev + b          (4h pre-activations, order i, f, g, o)
//! i = σ(z_i)   f = σ(z_f)   g = tanh(z_g)   o = σ(z_o)
//! c = f ⊙ c_prev + i ⊙ g
//! h = o ⊙ tanh(c)
//! ```
//!
//! Both directions of a BiLSTM start from zero hidden and cell states.

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::tensor::Tensor;

/// Weights of one LSTM direction. Gate blocks are stacked in the order
/// input, forget, cell candidate, output.
#[derive(Clone, Debug, PartialEq)]
pub struct LstmWeights {
    /// `[4 * hidden, input]`
    pub w_ih: Tensor,
    /// `[4 * hidden, hidden]`
    pub w_hh: Tensor,
    /// `[4 * hidden]`
    pub bias: Tensor,
}

impl LstmWeights {
    pub fn init(input: usize, hidden: usize, rng: &mut SeededRng) -> Self {
        Self {
            w_ih: rng.init_tensor(&[4 * hidden, input]),
            w_hh: rng.init_tensor(&[4 * hidden, hidden]),
            bias: rng.init_tensor(&[4 * hidden]),
        }
    }

    pub fn zeros(input: usize, hidden: usize) -> Self {
        Self {
            w_ih: Tensor::zeros(&[4 * hidden, input]),
            w_hh: Tensor::zeros(&[4 * hidden, hidden]),
            bias: Tensor::zeros(&[4 * hidden]),
        }
    }

    pub fn input_dim(&self) -> usize {
        self.w_ih.cols()
    }

    pub fn hidden_dim(&self) -> usize {
        self.w_hh.cols()
    }

    /// Checks that the three tensors agree on `(input, hidden)`.
    pub fn validate(&self) -> Result<()> {
        let h = self.hidden_dim();
        let ok = self.w_ih.is_matrix()
            && self.w_hh.is_matrix()
            && self.w_ih.rows() == 4 * h
            && self.w_hh.rows() == 4 * h
            && self.bias.shape() == [4 * h];
        if ok {
            Ok(())
        } else {
            Err(Error::shape("lstm weights", self.w_ih.shape(), self.w_hh.shape()))
        }
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        vec![&self.w_ih, &self.w_hh, &self.bias]
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        vec![&mut self.w_ih, &mut self.w_hh, &mut self.bias]
    }

    pub fn bind<'a>(&'a self, tape: &mut Tape<'a>) -> BoundLstm {
        BoundLstm {
            w_ih: tape.param(&self.w_ih),
            w_hh: tape.param(&self.w_hh),
            bias: tape.param(&self.bias),
            hidden: self.hidden_dim(),
        }
    }
}

/// LSTM weights registered on a tape.
#[derive(Clone, Copy, Debug)]
pub struct BoundLstm {
    pub w_ih: Var,
    pub w_hh: Var,
    pub bias: Var,
    pub hidden: usize,
}

impl BoundLstm {
    /// Builds a bound LSTM from three existing nodes (e.g. gradient-check inputs).
    pub fn from_vars(tape: &Tape<'_>, w_ih: Var, w_hh: Var, bias: Var) -> Self {
        let hidden = tape.value(w_hh).cols();
        Self {
            w_ih,
            w_hh,
            bias,
            hidden,
        }
    }
}

/// One recurrence step. Returns `(h, c)`.
pub fn lstm_step(tape: &mut Tape<'_>, x: Var, h_prev: Var, c_prev: Var, w: &BoundLstm) -> Result<(Var, Var)> {
    let hd = w.hidden;
    if tape.value(h_prev).shape() != [hd] || tape.value(c_prev).shape() != [hd] {
        return Err(Error::shape("lstm_step", tape.value(h_prev).shape(), &[hd]));
    }
    let zx = tape.matvec(w.w_ih, x)?;
    let zh = tape.matvec(w.w_hh, h_prev)?;
    let z = tape.add(zx, zh)?;
    let z = tape.add(z, w.bias)?;
    let zi = tape.slice(z, 0, hd)?;
    let zf = tape.slice(z, hd, hd)?;
    let zg = tape.slice(z, 2 * hd, hd)?;
    let zo = tape.slice(z, 3 * hd, hd)?;
    let i = tape.sigmoid(zi);
    let f = tape.sigmoid(zf);
    let g = tape.tanh(zg);
    let o = tape.sigmoid(zo);
    let keep = tape.mul(f, c_prev)?;
    let write = tape.mul(i, g)?;
    let c = tape.add(keep, write)?;
    let tc = tape.tanh(c);
    let h = tape.mul(o, tc)?;
    Ok((h, c))
}

/// Runs one direction over `inputs` from a zero state, returning the hidden
/// state at every step (in the order the inputs were visited).
fn run_direction(tape: &mut Tape<'_>, inputs: impl Iterator<Item = Var>, w: &BoundLstm) -> Result<Vec<Var>> {
    let zero = Tensor::zeros(&[w.hidden]);
    let mut h = tape.constant(zero.clone());
    let mut c = tape.constant(zero);
    let mut out = Vec::new();
    for x in inputs {
        let (nh, nc) = lstm_step(tape, x, h, c, w)?;
        out.push(nh);
        h = nh;
        c = nc;
    }
    Ok(out)
}

/// Bidirectional LSTM over a sequence of row vectors.
///
/// Returns `(forward, backward)`, both indexed by sequence position: row `j`
/// of `forward` has read positions `0..=j`, row `j` of `backward` has read
/// positions `j..m`.
pub fn bilstm(tape: &mut Tape<'_>, rows: &[Var], fw: &BoundLstm, bw: &BoundLstm) -> Result<(Vec<Var>, Vec<Var>)> {
    if rows.is_empty() {
        return Err(Error::invalid("bilstm over an empty sequence"));
    }
    let forward = run_direction(tape, rows.iter().copied(), fw)?;
    let mut backward = run_direction(tape, rows.iter().rev().copied(), bw)?;
    backward.reverse();
    Ok((forward, backward))
}

/// [`bilstm`] over the rows of a matrix node.
pub fn bilstm_matrix(tape: &mut Tape<'_>, m: Var, fw: &BoundLstm, bw: &BoundLstm) -> Result<(Vec<Var>, Vec<Var>)> {
    let n = tape.value(m).rows();
    if !tape.value(m).is_matrix() {
        return Err(Error::shape("bilstm", tape.value(m).shape(), &[0, 0]));
    }
    let rows = (0..n).map(|i| tape.row(m, i)).collect::<Result<Vec<_>>>()?;
    bilstm(tape, &rows, fw, bw)
}
