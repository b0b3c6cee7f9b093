//! Minimal reverse-mode automatic differentiation over dense `f64` tensors.

mod clip;
mod gradcheck;
mod tape;

pub use clip::{clip_gradients, clip_with, ClipMode};
pub use gradcheck::grad_check;
pub use tape::{Gradients, ParamId, Tape, Var};

pub(crate) use tape::softmax_raw;
