//! Define-by-run computation tape.
//!
//! Every forward operation appends a node holding its output value and the ids
//! of its inputs. Nodes are appended in evaluation order, so the tape is always
//! topologically sorted and the backward pass is a single reverse sweep.
//! Parameter tensors are borrowed rather than copied, which keeps large
//! embedding tables cheap to bind on every forward pass.

use std::borrow::Cow;
use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::tensor::Tensor;

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    pub fn index(self) -> usize {
        self.0
    }
}

/// Identifies a trainable parameter across forward passes.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ParamId(pub usize);

#[derive(Debug)]
enum Op {
    Leaf,
    Param(ParamId),
    MatVec(Var, Var),
    MatMul(Var, Var),
    Add(Var, Var),
    Sub(Var, Var),
    Mul(Var, Var),
    Affine(Var, f64),
    ScaleBy(Var, Var),
    Dot(Var, Var),
    Concat(Vec<Var>),
    Slice(Var, usize),
    StackRows(Vec<Var>),
    Row(Var, usize),
    GatherRows(Var, Vec<usize>),
    Sigmoid(Var),
    Tanh(Var),
    Abs(Var),
    MaxRows(Var, Vec<usize>),
    Softmax(Var),
    CrossEntropy(Var, usize, Vec<f64>),
    Sum(Vec<Var>),
    SumAll(Var),
}

struct Node<'a> {
    op: Op,
    value: Cow<'a, Tensor>,
}

/// A reverse-mode tape. Build one per forward pass.
#[derive(Default)]
pub struct Tape<'a> {
    nodes: Vec<Node<'a>>,
    next_param: usize,
}

/// Gradients of a scalar loss keyed by parameter id.
#[derive(Clone, Debug, Default, PartialEq)]
pub struct Gradients {
    map: BTreeMap<ParamId, Tensor>,
}

impl Gradients {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get(&self, id: ParamId) -> Option<&Tensor> {
        self.map.get(&id)
    }

    pub fn insert(&mut self, id: ParamId, grad: Tensor) {
        self.map.insert(id, grad);
    }

    pub fn len(&self) -> usize {
        self.map.len()
    }

    pub fn is_empty(&self) -> bool {
        self.map.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = (ParamId, &Tensor)> {
        self.map.iter().map(|(k, v)| (*k, v))
    }

    pub fn iter_mut(&mut self) -> impl Iterator<Item = (ParamId, &mut Tensor)> {
        self.map.iter_mut().map(|(k, v)| (*k, v))
    }

    /// L2 norm over every gradient entry.
    pub fn global_norm(&self) -> f64 {
        self.map.values().map(Tensor::sq_norm).sum::<f64>().sqrt()
    }

    pub fn all_finite(&self) -> bool {
        self.map.values().all(Tensor::all_finite)
    }
}

fn sigmoid(x: f64) -> f64 {
    if x >= 0.0 {
        1.0 / (1.0 + (-x).exp())
    } else {
        let e = x.exp();
        e / (1.0 + e)
    }
}

fn zip_with(a: &Tensor, b: &Tensor, f: impl Fn(f64, f64) -> f64) -> Tensor {
    Tensor::from_parts(
        a.shape().to_vec(),
        a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect(),
    )
}

fn accumulate(slot: &mut Option<Tensor>, grad: Tensor) {
    match slot {
        Some(existing) => {
            for (a, b) in existing.data_mut().iter_mut().zip(grad.data()) {
                *a += b;
            }
        }
        None => *slot = Some(grad),
    }
}

/// Adds `grad` into a flat range of the slot for `target`, allocating zeros of `shape` if needed.
fn accumulate_range(slot: &mut Option<Tensor>, shape: &[usize], offset: usize, grad: &[f64]) {
    let t = slot.get_or_insert_with(|| Tensor::zeros(shape));
    for (a, b) in t.data_mut()[offset..offset + grad.len()].iter_mut().zip(grad) {
        *a += b;
    }
}

impl<'a> Tape<'a> {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn value(&self, v: Var) -> &Tensor {
        &self.nodes[v.0].value
    }

    fn push(&mut self, op: Op, value: Tensor) -> Var {
        self.nodes.push(Node {
            op,
            value: Cow::Owned(value),
        });
        Var(self.nodes.len() - 1)
    }

    fn shape(&self, v: Var) -> &[usize] {
        self.nodes[v.0].value.shape()
    }

    /// Registers a constant input. It receives no gradient.
    pub fn constant(&mut self, value: Tensor) -> Var {
        self.push(Op::Leaf, value)
    }

    /// Registers a borrowed trainable parameter. Ids are assigned in registration order.
    pub fn param(&mut self, value: &'a Tensor) -> Var {
        let id = ParamId(self.next_param);
        self.next_param += 1;
        self.nodes.push(Node {
            op: Op::Param(id),
            value: Cow::Borrowed(value),
        });
        Var(self.nodes.len() - 1)
    }

    /// Registers an owned trainable parameter.
    pub fn param_owned(&mut self, value: Tensor) -> Var {
        let id = ParamId(self.next_param);
        self.next_param += 1;
        self.push(Op::Param(id), value)
    }

    /// Id of a parameter node, if `v` is one.
    pub fn param_id(&self, v: Var) -> Option<ParamId> {
        match self.nodes[v.0].op {
            Op::Param(id) => Some(id),
            _ => None,
        }
    }

    pub fn num_params(&self) -> usize {
        self.next_param
    }

    /// Matrix `[m, n]` times vector `[n]`.
    pub fn matvec(&mut self, w: Var, x: Var) -> Result<Var> {
        let (ws, xs) = (self.shape(w), self.shape(x));
        if ws.len() != 2 || xs.len() != 1 || ws[1] != xs[0] {
            return Err(Error::shape("matvec", ws, xs));
        }
        let (m, n) = (ws[0], ws[1]);
        let wd = self.value(w).data();
        let xd = self.value(x).data();
        let out: Vec<f64> = (0..m)
            .map(|i| wd[i * n..(i + 1) * n].iter().zip(xd).map(|(a, b)| a * b).sum())
            .collect();
        Ok(self.push(Op::MatVec(w, x), Tensor::from_parts(vec![m], out)))
    }

    /// Matrix `[m, k]` times matrix `[k, n]`.
    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (as_, bs) = (self.shape(a), self.shape(b));
        if as_.len() != 2 || bs.len() != 2 || as_[1] != bs[0] {
            return Err(Error::shape("matmul", as_, bs));
        }
        let out = matmul_raw(self.value(a), self.value(b));
        Ok(self.push(Op::MatMul(a, b), out))
    }

    fn same_shape(&self, op: &'static str, a: Var, b: Var) -> Result<()> {
        if self.shape(a) != self.shape(b) {
            return Err(Error::shape(op, self.shape(a), self.shape(b)));
        }
        Ok(())
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("add", a, b)?;
        let out = zip_with(self.value(a), self.value(b), |x, y| x + y);
        Ok(self.push(Op::Add(a, b), out))
    }

    pub fn sub(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("sub", a, b)?;
        let out = zip_with(self.value(a), self.value(b), |x, y| x - y);
        Ok(self.push(Op::Sub(a, b), out))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        self.same_shape("mul", a, b)?;
        let out = zip_with(self.value(a), self.value(b), |x, y| x * y);
        Ok(self.push(Op::Mul(a, b), out))
    }

    /// `scale * a + shift` with constant coefficients.
    pub fn affine(&mut self, a: Var, scale: f64, shift: f64) -> Var {
        let out = self.value(a).map(|x| scale * x + shift);
        self.push(Op::Affine(a, scale), out)
    }

    /// `1 - a`, elementwise.
    pub fn one_minus(&mut self, a: Var) -> Var {
        self.affine(a, -1.0, 1.0)
    }

    /// Multiplies every entry of `t` by the single-element tensor `s`.
    pub fn scale_by(&mut self, s: Var, t: Var) -> Result<Var> {
        if !self.value(s).is_scalar() {
            return Err(Error::shape("scale_by", self.shape(s), self.shape(t)));
        }
        let k = self.value(s).item();
        let out = self.value(t).map(|x| k * x);
        Ok(self.push(Op::ScaleBy(s, t), out))
    }

    /// Inner product of two same-length vectors, producing shape `[1]`.
    pub fn dot(&mut self, a: Var, b: Var) -> Result<Var> {
        if self.shape(a).len() != 1 || self.shape(a) != self.shape(b) {
            return Err(Error::shape("dot", self.shape(a), self.shape(b)));
        }
        let v: f64 = self
            .value(a)
            .data()
            .iter()
            .zip(self.value(b).data())
            .map(|(x, y)| x * y)
            .sum();
        Ok(self.push(Op::Dot(a, b), Tensor::from_parts(vec![1], vec![v])))
    }

    /// Concatenates vectors end to end.
    pub fn concat(&mut self, parts: &[Var]) -> Result<Var> {
        if parts.is_empty() {
            return Err(Error::invalid("concat of zero tensors"));
        }
        let mut data = Vec::new();
        for &p in parts {
            if self.shape(p).len() != 1 {
                return Err(Error::shape("concat", self.shape(parts[0]), self.shape(p)));
            }
            data.extend_from_slice(self.value(p).data());
        }
        let n = data.len();
        Ok(self.push(Op::Concat(parts.to_vec()), Tensor::from_parts(vec![n], data)))
    }

    /// Contiguous sub-vector `[start, start + len)`.
    pub fn slice(&mut self, v: Var, start: usize, len: usize) -> Result<Var> {
        let s = self.shape(v);
        if s.len() != 1 || len == 0 || start + len > s[0] {
            return Err(Error::shape("slice", s, &[start, len]));
        }
        let data = self.value(v).data()[start..start + len].to_vec();
        Ok(self.push(Op::Slice(v, start), Tensor::from_parts(vec![len], data)))
    }

    /// Stacks equal-length vectors as the rows of a matrix.
    pub fn stack_rows(&mut self, rows: &[Var]) -> Result<Var> {
        let Some(&first) = rows.first() else {
            return Err(Error::invalid("stack_rows of zero rows"));
        };
        let width = self.shape(first).to_vec();
        if width.len() != 1 {
            return Err(Error::shape("stack_rows", &width, &width));
        }
        let mut data = Vec::with_capacity(rows.len() * width[0]);
        for &r in rows {
            if self.shape(r) != width.as_slice() {
                return Err(Error::shape("stack_rows", &width, self.shape(r)));
            }
            data.extend_from_slice(self.value(r).data());
        }
        let shape = vec![rows.len(), width[0]];
        Ok(self.push(Op::StackRows(rows.to_vec()), Tensor::from_parts(shape, data)))
    }

    /// Row `i` of a matrix as a vector.
    pub fn row(&mut self, m: Var, i: usize) -> Result<Var> {
        let s = self.shape(m);
        if s.len() != 2 || i >= s[0] {
            return Err(Error::shape("row", s, &[i]));
        }
        let data = self.value(m).row(i).to_vec();
        let n = data.len();
        Ok(self.push(Op::Row(m, i), Tensor::from_parts(vec![n], data)))
    }

    /// Selects rows of a table; the backward pass scatter-adds into the table.
    pub fn gather_rows(&mut self, table: Var, indices: &[usize]) -> Result<Var> {
        let s = self.shape(table);
        if s.len() != 2 || indices.is_empty() || indices.iter().any(|&i| i >= s[0]) {
            return Err(Error::shape("gather_rows", s, &[indices.len()]));
        }
        let t = self.value(table);
        let mut data = Vec::with_capacity(indices.len() * t.cols());
        for &i in indices {
            data.extend_from_slice(t.row(i));
        }
        let shape = vec![indices.len(), t.cols()];
        Ok(self.push(Op::GatherRows(table, indices.to_vec()), Tensor::from_parts(shape, data)))
    }

    pub fn sigmoid(&mut self, a: Var) -> Var {
        let out = self.value(a).map(sigmoid);
        self.push(Op::Sigmoid(a), out)
    }

    pub fn tanh(&mut self, a: Var) -> Var {
        let out = self.value(a).map(f64::tanh);
        self.push(Op::Tanh(a), out)
    }

    pub fn abs(&mut self, a: Var) -> Var {
        let out = self.value(a).map(f64::abs);
        self.push(Op::Abs(a), out)
    }

    /// Columnwise maximum of a matrix (max pooling over the row axis).
    /// Ties resolve to the earliest row.
    pub fn max_rows(&mut self, m: Var) -> Result<Var> {
        let s = self.shape(m);
        if s.len() != 2 {
            return Err(Error::shape("max_rows", s, s));
        }
        let t = self.value(m);
        let (rows, cols) = (t.rows(), t.cols());
        let mut arg = vec![0usize; cols];
        let mut out = t.row(0).to_vec();
        for r in 1..rows {
            for (c, &v) in t.row(r).iter().enumerate() {
                if v > out[c] {
                    out[c] = v;
                    arg[c] = r;
                }
            }
        }
        Ok(self.push(Op::MaxRows(m, arg), Tensor::from_parts(vec![cols], out)))
    }

    pub fn softmax(&mut self, a: Var) -> Result<Var> {
        if self.shape(a).len() != 1 {
            return Err(Error::shape("softmax", self.shape(a), &[]));
        }
        let out = Tensor::from_parts(self.shape(a).to_vec(), softmax_raw(self.value(a).data()));
        Ok(self.push(Op::Softmax(a), out))
    }

    /// Negative log-likelihood of `target` under `softmax(logits)`, shape `[1]`.
    pub fn cross_entropy(&mut self, logits: Var, target: usize) -> Result<Var> {
        let s = self.shape(logits);
        if s.len() != 1 || target >= s[0] {
            return Err(Error::shape("cross_entropy", s, &[target]));
        }
        let z = self.value(logits).data();
        let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let lse = max + z.iter().map(|v| (v - max).exp()).sum::<f64>().ln();
        let loss = lse - z[target];
        let probs = softmax_raw(z);
        Ok(self.push(
            Op::CrossEntropy(logits, target, probs),
            Tensor::from_parts(vec![1], vec![loss]),
        ))
    }

    /// Elementwise sum of same-shaped tensors.
    pub fn sum(&mut self, parts: &[Var]) -> Result<Var> {
        let Some(&first) = parts.first() else {
            return Err(Error::invalid("sum of zero tensors"));
        };
        let mut acc = self.value(first).clone();
        for &p in &parts[1..] {
            if self.shape(p) != acc.shape() {
                return Err(Error::shape("sum", acc.shape(), self.shape(p)));
            }
            for (a, b) in acc.data_mut().iter_mut().zip(self.value(p).data()) {
                *a += b;
            }
        }
        Ok(self.push(Op::Sum(parts.to_vec()), acc))
    }

    /// Sum of all entries, shape `[1]`.
    pub fn sum_all(&mut self, a: Var) -> Var {
        let v = self.value(a).sum();
        self.push(Op::SumAll(a), Tensor::from_parts(vec![1], vec![v]))
    }

    /// Reverse sweep from a scalar `loss`, returning a gradient for every
    /// parameter registered on this tape (zeros for those the loss ignores).
    pub fn backward(&self, loss: Var) -> Result<Gradients> {
        if loss.0 >= self.nodes.len() {
            return Err(Error::invalid(format!("node {} is not on this tape", loss.0)));
        }
        if !self.value(loss).is_scalar() {
            return Err(Error::shape("backward (loss must be scalar)", self.shape(loss), &[1]));
        }
        let mut grads: Vec<Option<Tensor>> = Vec::new();
        grads.resize_with(loss.0 + 1, || None);
        grads[loss.0] = Some(Tensor::filled(self.shape(loss), 1.0));

        for idx in (0..=loss.0).rev() {
            let Some(g) = grads[idx].take() else { continue };
            let node = &self.nodes[idx];
            self.propagate(&node.op, &node.value, &g, &mut grads);
            grads[idx] = Some(g);
        }

        let mut out = Gradients::new();
        for (idx, node) in self.nodes.iter().enumerate() {
            if let Op::Param(id) = node.op {
                let g = grads
                    .get_mut(idx)
                    .and_then(Option::take)
                    .unwrap_or_else(|| Tensor::zeros(node.value.shape()));
                match out.map.get_mut(&id) {
                    Some(existing) => existing.axpy(1.0, &g),
                    None => out.insert(id, g),
                }
            }
        }
        Ok(out)
    }

    fn propagate(&self, op: &Op, out: &Tensor, g: &Tensor, grads: &mut [Option<Tensor>]) {
        let gd = g.data();
        match op {
            Op::Leaf | Op::Param(_) => {}
            Op::MatVec(w, x) => {
                let wv = self.value(*w);
                let xv = self.value(*x);
                let (m, n) = (wv.rows(), wv.cols());
                let mut gw = vec![0.0; m * n];
                for i in 0..m {
                    let gi = gd[i];
                    if gi != 0.0 {
                        for (dst, &xj) in gw[i * n..(i + 1) * n].iter_mut().zip(xv.data()) {
                            *dst = gi * xj;
                        }
                    }
                }
                let mut gx = vec![0.0; n];
                for (i, &gi) in gd.iter().enumerate().take(m) {
                    if gi != 0.0 {
                        for (dst, &wij) in gx.iter_mut().zip(wv.row(i)) {
                            *dst += gi * wij;
                        }
                    }
                }
                accumulate(&mut grads[w.0], Tensor::from_parts(vec![m, n], gw));
                accumulate(&mut grads[x.0], Tensor::from_parts(vec![n], gx));
            }
            Op::MatMul(a, b) => {
                let av = self.value(*a);
                let bv = self.value(*b);
                let ga = matmul_raw(g, &transpose(bv));
                let gb = matmul_raw(&transpose(av), g);
                accumulate(&mut grads[a.0], ga);
                accumulate(&mut grads[b.0], gb);
            }
            Op::Add(a, b) => {
                accumulate(&mut grads[a.0], g.clone());
                accumulate(&mut grads[b.0], g.clone());
            }
            Op::Sub(a, b) => {
                accumulate(&mut grads[a.0], g.clone());
                accumulate(&mut grads[b.0], g.map(|v| -v));
            }
            Op::Mul(a, b) => {
                let ga = zip_with(g, self.value(*b), |x, y| x * y);
                let gb = zip_with(g, self.value(*a), |x, y| x * y);
                accumulate(&mut grads[a.0], ga);
                accumulate(&mut grads[b.0], gb);
            }
            Op::Affine(a, scale) => accumulate(&mut grads[a.0], g.map(|v| v * scale)),
            Op::ScaleBy(s, t) => {
                let k = self.value(*s).item();
                let tv = self.value(*t);
                let gs: f64 = gd.iter().zip(tv.data()).map(|(x, y)| x * y).sum();
                accumulate(&mut grads[s.0], Tensor::filled(self.shape(*s), gs));
                accumulate(&mut grads[t.0], g.map(|v| v * k));
            }
            Op::Dot(a, b) => {
                let k = gd[0];
                accumulate(&mut grads[a.0], self.value(*b).map(|v| v * k));
                accumulate(&mut grads[b.0], self.value(*a).map(|v| v * k));
            }
            Op::Concat(parts) => {
                let mut offset = 0;
                for p in parts {
                    let n = self.value(*p).len();
                    let part = gd[offset..offset + n].to_vec();
                    accumulate(&mut grads[p.0], Tensor::from_parts(vec![n], part));
                    offset += n;
                }
            }
            Op::Slice(v, start) => {
                let shape = self.shape(*v).to_vec();
                accumulate_range(&mut grads[v.0], &shape, *start, gd);
            }
            Op::StackRows(rows) => {
                let cols = out.cols();
                for (i, r) in rows.iter().enumerate() {
                    let part = gd[i * cols..(i + 1) * cols].to_vec();
                    accumulate(&mut grads[r.0], Tensor::from_parts(vec![cols], part));
                }
            }
            Op::Row(m, i) => {
                let shape = self.shape(*m).to_vec();
                accumulate_range(&mut grads[m.0], &shape, i * shape[1], gd);
            }
            Op::GatherRows(table, indices) => {
                let shape = self.shape(*table).to_vec();
                let cols = shape[1];
                for (k, &i) in indices.iter().enumerate() {
                    accumulate_range(&mut grads[table.0], &shape, i * cols, &gd[k * cols..(k + 1) * cols]);
                }
            }
            Op::Sigmoid(a) => accumulate(&mut grads[a.0], zip_with(g, out, |gv, s| gv * s * (1.0 - s))),
            Op::Tanh(a) => accumulate(&mut grads[a.0], zip_with(g, out, |gv, t| gv * (1.0 - t * t))),
            Op::Abs(a) => {
                let ga = zip_with(g, self.value(*a), |gv, x| {
                    if x > 0.0 {
                        gv
                    } else if x < 0.0 {
                        -gv
                    } else {
                        0.0
                    }
                });
                accumulate(&mut grads[a.0], ga);
            }
            Op::MaxRows(m, arg) => {
                let shape = self.shape(*m).to_vec();
                let cols = shape[1];
                let mut gm = vec![0.0; shape[0] * cols];
                for (c, &r) in arg.iter().enumerate() {
                    gm[r * cols + c] = gd[c];
                }
                accumulate(&mut grads[m.0], Tensor::from_parts(shape, gm));
            }
            Op::Softmax(a) => {
                let y = out.data();
                let inner: f64 = gd.iter().zip(y).map(|(gv, yv)| gv * yv).sum();
                let ga: Vec<f64> = gd.iter().zip(y).map(|(gv, yv)| yv * (gv - inner)).collect();
                accumulate(&mut grads[a.0], Tensor::from_parts(out.shape().to_vec(), ga));
            }
            Op::CrossEntropy(logits, target, probs) => {
                let k = gd[0];
                let mut gl: Vec<f64> = probs.iter().map(|p| p * k).collect();
                gl[*target] -= k;
                let shape = self.shape(*logits).to_vec();
                accumulate(&mut grads[logits.0], Tensor::from_parts(shape, gl));
            }
            Op::Sum(parts) => {
                for p in parts {
                    accumulate(&mut grads[p.0], g.clone());
                }
            }
            Op::SumAll(a) => {
                let k = gd[0];
                accumulate(&mut grads[a.0], Tensor::filled(self.shape(*a), k));
            }
        }
    }
}

pub(crate) fn softmax_raw(z: &[f64]) -> Vec<f64> {
    let max = z.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let exps: Vec<f64> = z.iter().map(|v| (v - max).exp()).collect();
    let total: f64 = exps.iter().sum();
    exps.into_iter().map(|e| e / total).collect()
}

fn transpose(t: &Tensor) -> Tensor {
    let (r, c) = (t.rows(), t.cols());
    let mut out = vec![0.0; r * c];
    for i in 0..r {
        for j in 0..c {
            out[j * r + i] = t.data()[i * c + j];
        }
    }
    Tensor::from_parts(vec![c, r], out)
}

fn matmul_raw(a: &Tensor, b: &Tensor) -> Tensor {
    let (m, k, n) = (a.rows(), a.cols(), b.cols());
    let mut out = vec![0.0; m * n];
    for i in 0..m {
        for p in 0..k {
            let aip = a.data()[i * k + p];
            if aip == 0.0 {
                continue;
            }
            let brow = &b.data()[p * n..(p + 1) * n];
            for (o, &bv) in out[i * n..(i + 1) * n].iter_mut().zip(brow) {
                *o += aip * bv;
            }
        }
    }
    Tensor::from_parts(vec![m, n], out)
}
