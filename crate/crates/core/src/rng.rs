//! Seeded random numbers.
//!
//! All stochastic choices (parameter init, out-of-vocabulary embedding rows,
//! shuffling, synthetic corpora) draw from ChaCha8 seeded with
//! `ChaCha8Rng::seed_from_u64(seed)`. A uniform draw in `(0, 1)` takes the top
//! 53 bits `k` of one `next_u64` output and returns `(k + 0.5) / 2^53`, so the
//! stream is reproducible by any implementation of ChaCha8 without depending
//! on a particular distribution library.

use rand_chacha::rand_core::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::tensor::Tensor;

/// Half-width of the uniform init range used for every trainable tensor.
pub const INIT_RANGE: f64 = 0.05;

pub struct SeededRng {
    inner: ChaCha8Rng,
}

impl SeededRng {
    pub fn new(seed: u64) -> Self {
        Self {
            inner: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    /// Independent stream derived from `seed` and a purpose tag.
    pub fn derived(seed: u64, stream: u64) -> Self {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        rng.set_stream(stream);
        Self { inner: rng }
    }

    pub fn next_u64(&mut self) -> u64 {
        self.inner.next_u64()
    }

    /// Uniform in the open interval `(0, 1)`.
    pub fn unit(&mut self) -> f64 {
        let k = self.inner.next_u64() >> 11;
        (k as f64 + 0.5) / (1u64 << 53) as f64
    }

    /// Uniform in the open interval `(lo, hi)`.
    pub fn uniform(&mut self, lo: f64, hi: f64) -> f64 {
        lo + (hi - lo) * self.unit()
    }

    /// Uniform integer in `[0, n)`.
    pub fn below(&mut self, n: usize) -> usize {
        assert!(n > 0);
        (self.unit() * n as f64) as usize % n
    }

    /// Tensor with entries uniform in `(-range, range)`.
    pub fn uniform_tensor(&mut self, shape: &[usize], range: f64) -> Tensor {
        let n = shape.iter().product();
        let data = (0..n).map(|_| self.uniform(-range, range)).collect();
        Tensor::from_parts(shape.to_vec(), data)
    }

    /// Tensor initialised in `(-0.05, 0.05)`.
    pub fn init_tensor(&mut self, shape: &[usize]) -> Tensor {
        self.uniform_tensor(shape, INIT_RANGE)
    }

    /// Fisher-Yates shuffle.
    pub fn shuffle<T>(&mut self, items: &mut [T]) {
        for i in (1..items.len()).rev() {
            let j = self.below(i + 1);
            items.swap(i, j);
        }
    }
}
