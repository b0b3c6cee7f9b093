//! Ways of merging a word-level vector `v_w` with a character-level vector `v_c`.
//!
//! | method        | output                                  |
//! |---------------|-----------------------------------------|
//! | `w`           | `v_w`                                   |
//! | `c`           | `v_c`                                   |
//! | `cat`         | `[v_c ; v_w]`                           |
//! | `sg`          | `g v_c + (1 - g) v_w`, `g = σ(wᵀ v_w + b)` |
//! | `vg`          | `g ⊙ v_c + (1 - g) ⊙ v_w`, `g = σ(W v_w + b)` |
//!
//! Both gates look only at `v_w`. A gate of 0 reduces to `w`, a gate of 1 to `c`.

use std::fmt;
use std::str::FromStr;

use crate::autodiff::{Tape, Var};
use crate::error::{Error, Result};
use crate::rng::SeededRng;
use crate::tensor::Tensor;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum CombinationMethod {
    WordOnly,
    CharOnly,
    Concat,
    ScalarGate,
    VectorGate,
}

impl CombinationMethod {
    pub const ALL: [CombinationMethod; 5] = [
        CombinationMethod::WordOnly,
        CombinationMethod::CharOnly,
        CombinationMethod::Concat,
        CombinationMethod::ScalarGate,
        CombinationMethod::VectorGate,
    ];

    /// Short tag: `w`, `c`, `cat`, `sg` or `vg`.
    pub fn abbrev(self) -> &'static str {
        match self {
            CombinationMethod::WordOnly => "w",
            CombinationMethod::CharOnly => "c",
            CombinationMethod::Concat => "cat",
            CombinationMethod::ScalarGate => "sg",
            CombinationMethod::VectorGate => "vg",
        }
    }

    pub fn is_gate(self) -> bool {
        matches!(self, CombinationMethod::ScalarGate | CombinationMethod::VectorGate)
    }

    pub fn uses_words(self) -> bool {
        self != CombinationMethod::CharOnly
    }

    pub fn uses_chars(self) -> bool {
        self != CombinationMethod::WordOnly
    }

    /// Width of the combined vector given per-path width `d`.
    pub fn output_dim(self, d: usize) -> usize {
        if self == CombinationMethod::Concat {
            2 * d
        } else {
            d
        }
    }
}

impl fmt::Display for CombinationMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.abbrev())
    }
}

impl FromStr for CombinationMethod {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "w" | "word" | "word_only" => CombinationMethod::WordOnly,
            "c" | "char" | "char_only" => CombinationMethod::CharOnly,
            "cat" | "concat" => CombinationMethod::Concat,
            "sg" | "scalar_gate" => CombinationMethod::ScalarGate,
            "vg" | "vector_gate" => CombinationMethod::VectorGate,
            other => {
                return Err(Error::invalid(format!(
                    "unknown method `{other}`; valid methods are w, c, cat, sg, vg"
                )))
            }
        })
    }
}

/// `g = σ(wᵀ v_w + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct ScalarGateParams {
    /// `[d]`
    pub w: Tensor,
    /// `[1]`
    pub b: Tensor,
}

/// `g = σ(W v_w + b)`.
#[derive(Clone, Debug, PartialEq)]
pub struct VectorGateParams {
    /// `[d, d]`
    pub w: Tensor,
    /// `[d]`
    pub b: Tensor,
}

#[derive(Clone, Debug, PartialEq)]
pub enum GateParams {
    Scalar(ScalarGateParams),
    Vector(VectorGateParams),
}

impl GateParams {
    /// Gate parameters for `method`, or `None` for non-gate methods.
    pub fn init(method: CombinationMethod, d: usize, rng: &mut SeededRng) -> Option<Self> {
        match method {
            CombinationMethod::ScalarGate => Some(GateParams::Scalar(ScalarGateParams {
                w: rng.init_tensor(&[d]),
                b: rng.init_tensor(&[1]),
            })),
            CombinationMethod::VectorGate => Some(GateParams::Vector(VectorGateParams {
                w: rng.init_tensor(&[d, d]),
                b: rng.init_tensor(&[d]),
            })),
            _ => None,
        }
    }

    /// All-zero weights with every bias entry set to `bias`.
    pub fn constant(method: CombinationMethod, d: usize, bias: f64) -> Option<Self> {
        match method {
            CombinationMethod::ScalarGate => Some(GateParams::Scalar(ScalarGateParams {
                w: Tensor::zeros(&[d]),
                b: Tensor::filled(&[1], bias),
            })),
            CombinationMethod::VectorGate => Some(GateParams::Vector(VectorGateParams {
                w: Tensor::zeros(&[d, d]),
                b: Tensor::filled(&[d], bias),
            })),
            _ => None,
        }
    }

    pub fn method(&self) -> CombinationMethod {
        match self {
            GateParams::Scalar(_) => CombinationMethod::ScalarGate,
            GateParams::Vector(_) => CombinationMethod::VectorGate,
        }
    }

    pub fn tensors(&self) -> Vec<&Tensor> {
        match self {
            GateParams::Scalar(p) => vec![&p.w, &p.b],
            GateParams::Vector(p) => vec![&p.w, &p.b],
        }
    }

    pub fn tensors_mut(&mut self) -> Vec<&mut Tensor> {
        match self {
            GateParams::Scalar(p) => vec![&mut p.w, &mut p.b],
            GateParams::Vector(p) => vec![&mut p.w, &mut p.b],
        }
    }

    pub fn bind<'a>(&'a self, tape: &mut Tape<'a>) -> BoundGate {
        match self {
            GateParams::Scalar(p) => BoundGate::Scalar {
                w: tape.param(&p.w),
                b: tape.param(&p.b),
            },
            GateParams::Vector(p) => BoundGate::Vector {
                w: tape.param(&p.w),
                b: tape.param(&p.b),
            },
        }
    }
}

/// Gate parameters registered on a tape.
#[derive(Clone, Copy, Debug)]
pub enum BoundGate {
    Scalar { w: Var, b: Var },
    Vector { w: Var, b: Var },
}

impl BoundGate {
    fn method(self) -> CombinationMethod {
        match self {
            BoundGate::Scalar { .. } => CombinationMethod::ScalarGate,
            BoundGate::Vector { .. } => CombinationMethod::VectorGate,
        }
    }
}

/// Output of [`combine`]: the word representation and, for gates, the gate.
#[derive(Clone, Copy, Debug)]
pub struct Combined {
    pub v: Var,
    pub gate: Option<Var>,
}

fn matching_gate(method: CombinationMethod, gate: Option<&BoundGate>) -> Result<BoundGate> {
    match gate {
        Some(g) if g.method() == method => Ok(*g),
        Some(g) => Err(Error::invalid(format!(
            "gate parameters are for `{}` but method is `{method}`",
            g.method()
        ))),
        None => Err(Error::invalid(format!("method `{method}` requires gate parameters"))),
    }
}

/// Gate activation for `v_w` without forming the combined vector.
/// Scalar gates come back as a 1-vector.
pub fn gate_value(tape: &mut Tape<'_>, method: CombinationMethod, v_w: Var, gate: Option<&BoundGate>) -> Result<Var> {
    if !method.is_gate() {
        return Err(Error::invalid(format!("method `{method}` has no gate")));
    }
    let pre = match matching_gate(method, gate)? {
        BoundGate::Scalar { w, b } => {
            let s = tape.dot(w, v_w)?;
            tape.add(s, b)?
        }
        BoundGate::Vector { w, b } => {
            let s = tape.matvec(w, v_w)?;
            tape.add(s, b)?
        }
    };
    Ok(tape.sigmoid(pre))
}

/// Combines `v_w` and `v_c` with `method`. Gate methods need `gate`.
pub fn combine(
    tape: &mut Tape<'_>,
    method: CombinationMethod,
    v_w: Var,
    v_c: Var,
    gate: Option<&BoundGate>,
) -> Result<Combined> {
    let (sw, sc) = (tape.value(v_w).shape(), tape.value(v_c).shape());
    if sw.len() != 1 || sw != sc {
        return Err(Error::shape("combine", sw, sc));
    }
    match method {
        CombinationMethod::WordOnly => Ok(Combined { v: v_w, gate: None }),
        CombinationMethod::CharOnly => Ok(Combined { v: v_c, gate: None }),
        CombinationMethod::Concat => Ok(Combined {
            v: tape.concat(&[v_c, v_w])?,
            gate: None,
        }),
        CombinationMethod::ScalarGate => {
            let g = gate_value(tape, method, v_w, gate)?;
            let keep = tape.one_minus(g);
            let from_chars = tape.scale_by(g, v_c)?;
            let from_words = tape.scale_by(keep, v_w)?;
            Ok(Combined {
                v: tape.add(from_chars, from_words)?,
                gate: Some(g),
            })
        }
        CombinationMethod::VectorGate => {
            let g = gate_value(tape, method, v_w, gate)?;
            let keep = tape.one_minus(g);
            let from_chars = tape.mul(g, v_c)?;
            let from_words = tape.mul(keep, v_w)?;
            Ok(Combined {
                v: tape.add(from_chars, from_words)?,
                gate: Some(g),
            })
        }
    }
}

/// Tape-free convenience wrapper around [`combine`].
pub fn combine_tensors(
    method: CombinationMethod,
    v_w: &Tensor,
    v_c: &Tensor,
    params: Option<&GateParams>,
) -> Result<(Tensor, Option<Tensor>)> {
    let mut tape = Tape::new();
    let gate = params.map(|p| p.bind(&mut tape));
    let w = tape.constant(v_w.clone());
    let c = tape.constant(v_c.clone());
    let out = combine(&mut tape, method, w, c, gate.as_ref())?;
    Ok((tape.value(out.v).clone(), out.gate.map(|g| tape.value(g).clone())))
}

/// Tape-free convenience wrapper around [`gate_value`].
pub fn gate_tensor(method: CombinationMethod, v_w: &Tensor, params: Option<&GateParams>) -> Result<Tensor> {
    let mut tape = Tape::new();
    let gate = params.map(|p| p.bind(&mut tape));
    let w = tape.constant(v_w.clone());
    let g = gate_value(&mut tape, method, w, gate.as_ref())?;
    Ok(tape.value(g).clone())
}
