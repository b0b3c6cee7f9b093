//! Central-difference gradient checking.

use crate::autodiff::tape::{ParamId, Tape, Var};
use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Denominator floor for the relative error. Central differences at
/// `epsilon = 1e-5` resolve derivatives only to about `1e-11·|f|`, so entries
/// far below this floor are compared in absolute terms instead.
pub const REL_FLOOR: f64 = 1e-6;

/// Compares reverse-mode gradients of the scalar function `f` against
/// central differences at `point`, returning the largest relative error
/// `|analytic - numeric| / max(|analytic|, |numeric|, REL_FLOOR)`.
///
/// `f` receives one parameter node per tensor of `point`, in order.
pub fn grad_check<F>(f: F, point: &[Tensor], epsilon: f64) -> Result<f64>
where
    F: Fn(&mut Tape<'_>, &[Var]) -> Result<Var>,
{
    if epsilon.is_nan() || epsilon <= 0.0 {
        return Err(Error::invalid(format!("epsilon must be positive, got {epsilon}")));
    }
    let analytic = {
        let mut tape = Tape::new();
        let vars: Vec<Var> = point.iter().map(|t| tape.param(t)).collect();
        let loss = f(&mut tape, &vars)?;
        check_scalar(&tape, loss)?;
        tape.backward(loss)?
    };

    let eval = |p: &[Tensor]| -> Result<f64> {
        let mut tape = Tape::new();
        let vars: Vec<Var> = p.iter().map(|t| tape.param(t)).collect();
        let loss = f(&mut tape, &vars)?;
        check_scalar(&tape, loss)
    };

    let mut worst = 0.0f64;
    let mut probe = point.to_vec();
    for (i, t) in point.iter().enumerate() {
        let grad = analytic
            .get(ParamId(i))
            .ok_or_else(|| Error::invalid("parameter missing from gradient map"))?;
        for j in 0..t.len() {
            let orig = t.data()[j];
            probe[i].data_mut()[j] = orig + epsilon;
            let up = eval(&probe)?;
            probe[i].data_mut()[j] = orig - epsilon;
            let down = eval(&probe)?;
            probe[i].data_mut()[j] = orig;
            let numeric = (up - down) / (2.0 * epsilon);
            let a = grad.data()[j];
            let rel = (a - numeric).abs() / a.abs().max(numeric.abs()).max(REL_FLOOR);
            worst = worst.max(rel);
        }
    }
    Ok(worst)
}

fn check_scalar(tape: &Tape<'_>, loss: Var) -> Result<f64> {
    let v = tape.value(loss);
    if !v.is_scalar() {
        return Err(Error::shape("grad_check (f must be scalar)", v.shape(), &[1]));
    }
    let x = v.item();
    if !x.is_finite() {
        return Err(Error::NonFinite(format!("function value {x} during gradient check")));
    }
    Ok(x)
}
