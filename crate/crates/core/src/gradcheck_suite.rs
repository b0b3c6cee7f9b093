//! Central-difference checks of every differentiable building block.
//!
//! Each component is reduced to a scalar by a fixed random projection of its
//! output (cross-entropy is already scalar) and checked at independently drawn
//! random points, with every input and parameter perturbed.

use std::time::Instant;

use crate::autodiff::{grad_check, Tape, Var};
use crate::char_encoder::aggregate;
use crate::combinators::{combine, BoundGate, CombinationMethod};
use crate::error::Result;
use crate::lstm::{bilstm, lstm_step, BoundLstm};
use crate::rng::SeededRng;
use crate::sentence_encoder::{encode_sentence, nli_forward, BoundClassifier, BoundSentenceEncoder};
use crate::tensor::Tensor;

pub const GRADCHECK_EPSILON: f64 = 1e-5;
pub const GRADCHECK_THRESHOLD: f64 = 1e-4;
pub const GRADCHECK_POINTS: usize = 100;

/// Half-width of the uniform range random points are drawn from.
const POINT_RANGE: f64 = 0.5;

const IN: usize = 3;
const HID: usize = 4;
const SEQ: usize = 3;

#[derive(Clone, Debug, PartialEq)]
pub struct ComponentCheck {
    pub component: &'static str,
    pub points: usize,
    pub max_rel_error: f64,
    pub seconds: f64,
}

impl ComponentCheck {
    pub fn passed(&self) -> bool {
        self.max_rel_error < GRADCHECK_THRESHOLD
    }
}

type Component = fn(&mut SeededRng) -> Result<f64>;

/// Component names in suite order.
pub const COMPONENTS: [&str; 8] = [
    "lstm_step",
    "bilstm",
    "char_aggregation",
    "scalar_gate",
    "vector_gate",
    "maxpool_sentence_encoder",
    "nli_head",
    "cross_entropy",
];

fn component_fn(name: &str) -> Component {
    match name {
        "lstm_step" => check_lstm_step,
        "bilstm" => check_bilstm,
        "char_aggregation" => check_aggregation,
        "scalar_gate" => |rng| check_gate(rng, CombinationMethod::ScalarGate),
        "vector_gate" => |rng| check_gate(rng, CombinationMethod::VectorGate),
        "maxpool_sentence_encoder" => check_sentence_encoder,
        "nli_head" => check_nli_head,
        "cross_entropy" => check_cross_entropy,
        _ => unreachable!("unknown component {name}"),
    }
}

/// Runs every component at `points` random points drawn from `seed`.
pub fn run_suite(points: usize, seed: u64) -> Result<Vec<ComponentCheck>> {
    COMPONENTS
        .iter()
        .enumerate()
        .map(|(i, &name)| {
            let start = Instant::now();
            let mut rng = SeededRng::derived(seed, 100 + i as u64);
            let mut worst = 0.0f64;
            for _ in 0..points {
                worst = worst.max(component_fn(name)(&mut rng)?);
            }
            Ok(ComponentCheck {
                component: name,
                points,
                max_rel_error: worst,
                seconds: start.elapsed().as_secs_f64(),
            })
        })
        .collect()
}

fn draw(rng: &mut SeededRng, shape: &[usize]) -> Tensor {
    rng.uniform_tensor(shape, POINT_RANGE)
}

fn lstm_tensors(rng: &mut SeededRng, input: usize, hidden: usize) -> [Tensor; 3] {
    [
        draw(rng, &[4 * hidden, input]),
        draw(rng, &[4 * hidden, hidden]),
        draw(rng, &[4 * hidden]),
    ]
}

fn bound_lstm(tape: &Tape<'_>, v: &[Var]) -> BoundLstm {
    BoundLstm::from_vars(tape, v[0], v[1], v[2])
}

/// `r · x` for a constant `r`.
fn project(tape: &mut Tape<'_>, x: Var, r: &Tensor) -> Result<Var> {
    let r = tape.constant(r.clone());
    tape.dot(r, x)
}

fn check(point: Vec<Tensor>, f: impl Fn(&mut Tape<'_>, &[Var]) -> Result<Var>) -> Result<f64> {
    grad_check(f, &point, GRADCHECK_EPSILON)
}

fn check_lstm_step(rng: &mut SeededRng) -> Result<f64> {
    let mut point = vec![draw(rng, &[IN]), draw(rng, &[HID]), draw(rng, &[HID])];
    point.extend(lstm_tensors(rng, IN, HID));
    let (rh, rc) = (draw(rng, &[HID]), draw(rng, &[HID]));
    check(point, |tape, v| {
        let w = bound_lstm(tape, &v[3..6]);
        let (h, c) = lstm_step(tape, v[0], v[1], v[2], &w)?;
        let a = project(tape, h, &rh)?;
        let b = project(tape, c, &rc)?;
        tape.add(a, b)
    })
}

fn check_bilstm(rng: &mut SeededRng) -> Result<f64> {
    let mut point: Vec<Tensor> = (0..SEQ).map(|_| draw(rng, &[IN])).collect();
    point.extend(lstm_tensors(rng, IN, HID));
    point.extend(lstm_tensors(rng, IN, HID));
    let r = draw(rng, &[2 * SEQ * HID]);
    check(point, |tape, v| {
        let fw = bound_lstm(tape, &v[SEQ..SEQ + 3]);
        let bw = bound_lstm(tape, &v[SEQ + 3..SEQ + 6]);
        let (f, b) = bilstm(tape, &v[..SEQ], &fw, &bw)?;
        let all: Vec<Var> = f.into_iter().chain(b).collect();
        let joined = tape.concat(&all)?;
        project(tape, joined, &r)
    })
}

fn check_aggregation(rng: &mut SeededRng) -> Result<f64> {
    let d = 5;
    let mut point: Vec<Tensor> = (0..2 * SEQ).map(|_| draw(rng, &[HID])).collect();
    point.push(draw(rng, &[d, 2 * HID]));
    point.push(draw(rng, &[d]));
    let r = draw(rng, &[d]);
    check(point, |tape, v| {
        let out = aggregate(tape, &v[..SEQ], &v[SEQ..2 * SEQ], v[2 * SEQ], v[2 * SEQ + 1])?;
        project(tape, out, &r)
    })
}

fn check_gate(rng: &mut SeededRng, method: CombinationMethod) -> Result<f64> {
    let d = 4;
    let (w_shape, b_shape): (&[usize], &[usize]) = match method {
        CombinationMethod::ScalarGate => (&[d], &[1]),
        _ => (&[d, d], &[d]),
    };
    let point = vec![draw(rng, &[d]), draw(rng, &[d]), draw(rng, w_shape), draw(rng, b_shape)];
    let r = draw(rng, &[d]);
    check(point, |tape, v| {
        let gate = match method {
            CombinationMethod::ScalarGate => BoundGate::Scalar { w: v[2], b: v[3] },
            _ => BoundGate::Vector { w: v[2], b: v[3] },
        };
        let out = combine(tape, method, v[0], v[1], Some(&gate))?;
        project(tape, out.v, &r)
    })
}

fn zero_head(tape: &mut Tape<'_>) -> BoundClassifier {
    let mut c = || tape.constant(Tensor::zeros(&[1]));
    BoundClassifier {
        w1: c(),
        b1: c(),
        w2: c(),
        b2: c(),
    }
}

fn check_sentence_encoder(rng: &mut SeededRng) -> Result<f64> {
    let mut point: Vec<Tensor> = (0..SEQ).map(|_| draw(rng, &[IN])).collect();
    point.extend(lstm_tensors(rng, IN, HID));
    point.extend(lstm_tensors(rng, IN, HID));
    let r = draw(rng, &[2 * HID]);
    check(point, |tape, v| {
        let enc = BoundSentenceEncoder {
            fw: bound_lstm(tape, &v[SEQ..SEQ + 3]),
            bw: bound_lstm(tape, &v[SEQ + 3..SEQ + 6]),
            head: zero_head(tape),
        };
        let s = encode_sentence(tape, &v[..SEQ], &enc)?;
        project(tape, s, &r)
    })
}

fn check_nli_head(rng: &mut SeededRng) -> Result<f64> {
    let (ds, hidden) = (4, 5);
    let point = vec![
        draw(rng, &[ds]),
        draw(rng, &[ds]),
        draw(rng, &[hidden, 4 * ds]),
        draw(rng, &[hidden]),
        draw(rng, &[3, hidden]),
        draw(rng, &[3]),
    ];
    let r = draw(rng, &[3]);
    check(point, |tape, v| {
        let head = BoundClassifier {
            w1: v[2],
            b1: v[3],
            w2: v[4],
            b2: v[5],
        };
        let z = nli_forward(tape, v[0], v[1], &head)?;
        project(tape, z, &r)
    })
}

fn check_cross_entropy(rng: &mut SeededRng) -> Result<f64> {
    let point = vec![rng.uniform_tensor(&[3], 3.0)];
    let target = rng.below(3);
    check(point, |tape, v| tape.cross_entropy(v[0], target))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_component_passes_at_a_few_points() {
        for c in run_suite(3, 42).unwrap() {
            assert!(c.passed(), "{} max relative error {}", c.component, c.max_rel_error);
        }
    }

    #[test]
    fn suite_is_deterministic() {
        assert_eq!(
            run_suite(1, 5)
                .unwrap()
                .iter()
                .map(|c| c.max_rel_error)
                .collect::<Vec<_>>(),
            run_suite(1, 5)
                .unwrap()
                .iter()
                .map(|c| c.max_rel_error)
                .collect::<Vec<_>>()
        );
    }
}
