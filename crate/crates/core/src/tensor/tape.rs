//! Reverse-mode automatic differentiation over a linear tape.
//!
//! Every operation appends a node holding its output value and a backward
//! rule. [`Tape::backward`] walks the nodes once in reverse recording order
//! and accumulates gradients into leaves created with `requires_grad`.
//! Leaf gradients add up across backward calls until [`Tape::zero_grad`].

use std::sync::Arc;

use rand::Rng;

use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::kernels::{self, for_each_row};
use crate::tensor::{EdgeIndex, Segments, SparseMatrix, Tensor};

/// Handle to a node on a [`Tape`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Var(usize);

impl Var {
    #[inline]
    pub fn id(self) -> usize {
        self.0
    }
}

/// Negative slope used for attention scores.
pub const LEAKY_RELU_SLOPE: f64 = 0.2;

/// Pointwise nonlinearities. ELU uses α = 1.
#[derive(Clone, Copy, Debug, PartialEq)]
pub enum Activation {
    Relu,
    Elu,
    LeakyRelu(f64),
}

impl Activation {
    #[inline]
    fn apply<T: Real>(self, x: T) -> T {
        match self {
            Activation::Relu => {
                if x > T::zero() {
                    x
                } else {
                    T::zero()
                }
            }
            Activation::Elu => {
                if x >= T::zero() {
                    x
                } else {
                    x.exp_m1()
                }
            }
            Activation::LeakyRelu(slope) => {
                if x >= T::zero() {
                    x
                } else {
                    T::of(slope) * x
                }
            }
        }
    }

    /// Derivative given input `x` and output `y`.
    #[inline]
    fn derivative<T: Real>(self, x: T, y: T) -> T {
        match self {
            Activation::Relu => {
                if x > T::zero() {
                    T::one()
                } else {
                    T::zero()
                }
            }
            Activation::Elu => {
                if x >= T::zero() {
                    T::one()
                } else {
                    y + T::one()
                }
            }
            Activation::LeakyRelu(slope) => {
                if x >= T::zero() {
                    T::one()
                } else {
                    T::of(slope)
                }
            }
        }
    }
}

enum Op<T> {
    Leaf,
    MatMul(Var, Var),
    SpMM(Arc<SparseMatrix<T>>, Var),
    Add(Var, Var),
    AddBias(Var, Var),
    Mul(Var, Var),
    ScaleRows(Var, Arc<[T]>),
    MulRows(Var, Var),
    Activation(Var, Activation),
    Mask(Var, Vec<T>),
    SegmentSoftmax(Var, Segments),
    RowLogSoftmax(Var),
    MaskedNll {
        input: Var,
        picks: Vec<(usize, usize)>,
    },
    Sum(Var),
    EdgeGather {
        left: Var,
        right: Var,
        edges: Arc<EdgeIndex>,
    },
    EdgeAggregate {
        weights: Var,
        feats: Var,
        edges: Arc<EdgeIndex>,
    },
    ConcatRows(Var, Var),
    SliceRows(Var, usize),
}

struct Node<T> {
    value: Tensor<T>,
    op: Op<T>,
    requires_grad: bool,
    grad: Option<Tensor<T>>,
}

/// Recorded computation. Single-threaded unit of work; each training run
/// owns its own tape.
pub struct Tape<T> {
    nodes: Vec<Node<T>>,
}

impl<T: Real> Default for Tape<T> {
    fn default() -> Self {
        Self::new()
    }
}

fn same_shape<T: Real>(op: &'static str, a: &Tensor<T>, b: &Tensor<T>) -> Result<()> {
    if a.shape() != b.shape() {
        return Err(Error::shape(op, format!("{:?} vs {:?}", a.shape(), b.shape())));
    }
    Ok(())
}

fn column<T: Real>(op: &'static str, t: &Tensor<T>, rows: usize) -> Result<()> {
    if t.cols() != 1 || t.rows() != rows {
        return Err(Error::shape(op, format!("expected {rows}x1, got {:?}", t.shape())));
    }
    Ok(())
}

impl<T: Real> Tape<T> {
    pub fn new() -> Self {
        Self { nodes: Vec::new() }
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    fn push(&mut self, value: Tensor<T>, op: Op<T>, inputs: &[Var]) -> Var {
        let requires_grad = inputs.iter().any(|v| self.nodes[v.0].requires_grad);
        self.nodes.push(Node {
            value,
            op,
            requires_grad,
            grad: None,
        });
        Var(self.nodes.len() - 1)
    }

    /// Adds an input tensor. Gradients are accumulated only for leaves with
    /// `requires_grad`.
    pub fn leaf(&mut self, value: Tensor<T>, requires_grad: bool) -> Var {
        self.nodes.push(Node {
            value,
            op: Op::Leaf,
            requires_grad,
            grad: None,
        });
        Var(self.nodes.len() - 1)
    }

    pub fn param(&mut self, value: Tensor<T>) -> Var {
        self.leaf(value, true)
    }

    pub fn constant(&mut self, value: Tensor<T>) -> Var {
        self.leaf(value, false)
    }

    #[inline]
    pub fn value(&self, v: Var) -> &Tensor<T> {
        &self.nodes[v.0].value
    }

    #[inline]
    pub fn requires_grad(&self, v: Var) -> bool {
        self.nodes[v.0].requires_grad
    }

    /// Accumulated gradient of a leaf; `None` before any backward pass
    /// reached it.
    pub fn grad(&self, v: Var) -> Option<&Tensor<T>> {
        self.nodes[v.0].grad.as_ref()
    }

    pub fn zero_grad(&mut self) {
        for n in &mut self.nodes {
            n.grad = None;
        }
    }

    /// Dedicated NaN/Inf check on a recorded value.
    pub fn check_finite(&self, v: Var, context: &str) -> Result<()> {
        self.value(v).check_finite(context)
    }

    pub fn matmul(&mut self, a: Var, b: Var) -> Result<Var> {
        let out = kernels::matmul(self.value(a), self.value(b))?;
        Ok(self.push(out, Op::MatMul(a, b), &[a, b]))
    }

    /// Sparse-dense product; the sparse values are constants.
    pub fn spmm(&mut self, s: &Arc<SparseMatrix<T>>, d: Var) -> Result<Var> {
        let out = kernels::spmm(s, self.value(d))?;
        Ok(self.push(out, Op::SpMM(Arc::clone(s), d), &[d]))
    }

    pub fn add(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        same_shape("add", av, bv)?;
        let data = av.data().iter().zip(bv.data()).map(|(&x, &y)| x + y).collect();
        let out = Tensor::new(av.rows(), av.cols(), data)?;
        Ok(self.push(out, Op::Add(a, b), &[a, b]))
    }

    /// `x + 1·bias` with `bias` of shape `1 x cols`.
    pub fn add_bias(&mut self, x: Var, bias: Var) -> Result<Var> {
        let (xv, bv) = (self.value(x), self.value(bias));
        if bv.rows() != 1 || bv.cols() != xv.cols() {
            return Err(Error::shape("add_bias", format!("{:?} + {:?}", xv.shape(), bv.shape())));
        }
        let mut out = xv.clone();
        let b = bv.data();
        for r in 0..out.rows() {
            for (o, &bb) in out.row_mut(r).iter_mut().zip(b) {
                *o += bb;
            }
        }
        Ok(self.push(out, Op::AddBias(x, bias), &[x, bias]))
    }

    /// Elementwise product.
    pub fn mul(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        same_shape("mul", av, bv)?;
        let data = av.data().iter().zip(bv.data()).map(|(&x, &y)| x * y).collect();
        let out = Tensor::new(av.rows(), av.cols(), data)?;
        Ok(self.push(out, Op::Mul(a, b), &[a, b]))
    }

    /// Multiplies row `r` by the constant `scale[r]` (a diagonal left product).
    pub fn scale_rows(&mut self, x: Var, scale: &Arc<[T]>) -> Result<Var> {
        let xv = self.value(x);
        if scale.len() != xv.rows() {
            return Err(Error::shape(
                "scale_rows",
                format!("{} scales for {} rows", scale.len(), xv.rows()),
            ));
        }
        let mut out = xv.clone();
        for (r, &s) in scale.iter().enumerate() {
            for o in out.row_mut(r) {
                *o *= s;
            }
        }
        Ok(self.push(out, Op::ScaleRows(x, Arc::clone(scale)), &[x]))
    }

    /// Multiplies row `r` of `x` by `s[r]` where `s` is a trainable `n x 1`.
    pub fn mul_rows(&mut self, s: Var, x: Var) -> Result<Var> {
        let (sv, xv) = (self.value(s), self.value(x));
        column("mul_rows", sv, xv.rows())?;
        let mut out = xv.clone();
        for r in 0..out.rows() {
            let k = sv.data()[r];
            for o in out.row_mut(r) {
                *o *= k;
            }
        }
        Ok(self.push(out, Op::MulRows(s, x), &[s, x]))
    }

    pub fn activation(&mut self, kind: Activation, x: Var) -> Result<Var> {
        if let Activation::LeakyRelu(slope) = kind {
            if !(slope > 0.0 && slope < 1.0) {
                return Err(Error::Param(format!("leaky_relu slope {slope} outside (0,1)")));
            }
        }
        let out = self.value(x).map(|v| kind.apply(v));
        Ok(self.push(out, Op::Activation(x, kind), &[x]))
    }

    pub fn relu(&mut self, x: Var) -> Result<Var> {
        self.activation(Activation::Relu, x)
    }

    pub fn elu(&mut self, x: Var) -> Result<Var> {
        self.activation(Activation::Elu, x)
    }

    pub fn leaky_relu(&mut self, x: Var) -> Result<Var> {
        self.activation(Activation::LeakyRelu(LEAKY_RELU_SLOPE), x)
    }

    /// Inverted dropout. Returns `x` itself at inference or when `rate` is 0.
    pub fn dropout<R: Rng + ?Sized>(&mut self, x: Var, rate: f64, training: bool, rng: &mut R) -> Result<Var> {
        if !(0.0..1.0).contains(&rate) {
            return Err(Error::Param(format!("dropout rate {rate} outside [0,1)")));
        }
        if !training || rate == 0.0 {
            return Ok(x);
        }
        let keep = T::of(1.0 / (1.0 - rate));
        let xv = self.value(x);
        let mask: Vec<T> = (0..xv.len())
            .map(|_| if rng.random::<f64>() < rate { T::zero() } else { keep })
            .collect();
        let data = xv.data().iter().zip(&mask).map(|(&v, &m)| v * m).collect();
        let out = Tensor::new(xv.rows(), xv.cols(), data)?;
        Ok(self.push(out, Op::Mask(x, mask), &[x]))
    }

    /// Softmax within each group of an `E x 1` score column.
    pub fn segment_softmax(&mut self, scores: Var, segments: &Segments) -> Result<Var> {
        let sv = self.value(scores);
        column("segment_softmax", sv, segments.len())?;
        let ids = segments.ids();
        let mut max = vec![T::neg_infinity(); segments.count()];
        for (&g, &s) in ids.iter().zip(sv.data()) {
            if s > max[g] {
                max[g] = s;
            }
        }
        let mut exps: Vec<T> = ids.iter().zip(sv.data()).map(|(&g, &s)| (s - max[g]).exp()).collect();
        let mut sums = vec![T::zero(); segments.count()];
        for (&g, &e) in ids.iter().zip(&exps) {
            sums[g] += e;
        }
        for (e, &g) in exps.iter_mut().zip(ids) {
            *e = *e / sums[g];
        }
        let out = Tensor::new(exps.len(), 1, exps)?;
        Ok(self.push(out, Op::SegmentSoftmax(scores, segments.clone()), &[scores]))
    }

    /// Row-wise log-softmax with max subtraction.
    pub fn row_log_softmax(&mut self, x: Var) -> Result<Var> {
        let xv = self.value(x);
        if xv.cols() == 0 {
            return Err(Error::shape("row_log_softmax", "zero columns"));
        }
        let mut out = xv.clone();
        for r in 0..out.rows() {
            let row = out.row_mut(r);
            let m = row.iter().copied().fold(T::neg_infinity(), T::max);
            let lse = row.iter().map(|&v| (v - m).exp()).sum::<T>().ln();
            for v in row.iter_mut() {
                *v = *v - m - lse;
            }
        }
        Ok(self.push(out, Op::RowLogSoftmax(x), &[x]))
    }

    /// Mean negative log-likelihood over the masked rows.
    pub fn masked_nll(&mut self, log_probs: Var, labels: &[usize], mask: &[usize]) -> Result<Var> {
        if mask.is_empty() {
            return Err(Error::Param("masked_nll: empty mask".into()));
        }
        let lp = self.value(log_probs);
        let mut picks = Vec::with_capacity(mask.len());
        for &u in mask {
            if u >= lp.rows() || u >= labels.len() {
                return Err(Error::Index {
                    what: "mask node",
                    index: u,
                    len: lp.rows().min(labels.len()),
                });
            }
            let c = labels[u];
            if c >= lp.cols() {
                return Err(Error::Index {
                    what: "label",
                    index: c,
                    len: lp.cols(),
                });
            }
            picks.push((u, c));
        }
        let total: T = picks.iter().map(|&(u, c)| lp.get(u, c)).sum();
        let out = Tensor::scalar(-total / T::of(picks.len() as f64));
        Ok(self.push(out, Op::MaskedNll { input: log_probs, picks }, &[log_probs]))
    }

    pub fn sum(&mut self, x: Var) -> Result<Var> {
        let out = Tensor::scalar(self.value(x).sum());
        Ok(self.push(out, Op::Sum(x), &[x]))
    }

    /// Per-message score `left[dst[e]] + right[src[e]]`.
    pub fn edge_gather(&mut self, left: Var, right: Var, edges: &Arc<EdgeIndex>) -> Result<Var> {
        let (lv, rv) = (self.value(left), self.value(right));
        column("edge_gather(left)", lv, edges.num_dst())?;
        column("edge_gather(right)", rv, edges.num_src())?;
        let (l, r) = (lv.data(), rv.data());
        let data: Vec<T> = edges
            .dst()
            .iter()
            .zip(edges.src())
            .map(|(&d, &s)| l[d] + r[s])
            .collect();
        let out = Tensor::new(data.len(), 1, data)?;
        Ok(self.push(
            out,
            Op::EdgeGather {
                left,
                right,
                edges: Arc::clone(edges),
            },
            &[left, right],
        ))
    }

    /// `out[d] = Σ_{e: dst[e]=d} weights[e] · feats[src[e]]`.
    pub fn edge_aggregate(&mut self, weights: Var, feats: Var, edges: &Arc<EdgeIndex>) -> Result<Var> {
        let (wv, fv) = (self.value(weights), self.value(feats));
        column("edge_aggregate(weights)", wv, edges.len())?;
        if fv.rows() != edges.num_src() {
            return Err(Error::shape(
                "edge_aggregate",
                format!("{} feature rows for {} sources", fv.rows(), edges.num_src()),
            ));
        }
        let f = fv.cols();
        let mut out = Tensor::zeros(edges.num_dst(), f);
        let (w, fd, src) = (wv.data(), fv.data(), edges.src());
        for_each_row(out.data_mut(), f, edges.len() * f, |d, row| {
            for e in edges.range(d) {
                let we = w[e];
                let s = src[e];
                for (o, &x) in row.iter_mut().zip(&fd[s * f..(s + 1) * f]) {
                    *o += we * x;
                }
            }
        });
        Ok(self.push(
            out,
            Op::EdgeAggregate {
                weights,
                feats,
                edges: Arc::clone(edges),
            },
            &[weights, feats],
        ))
    }

    /// Stacks `a` on top of `b`.
    pub fn concat_rows(&mut self, a: Var, b: Var) -> Result<Var> {
        let (av, bv) = (self.value(a), self.value(b));
        if av.cols() != bv.cols() {
            return Err(Error::shape("concat_rows", format!("{:?} over {:?}", av.shape(), bv.shape())));
        }
        let mut data = Vec::with_capacity(av.len() + bv.len());
        data.extend_from_slice(av.data());
        data.extend_from_slice(bv.data());
        let out = Tensor::new(av.rows() + bv.rows(), av.cols(), data)?;
        Ok(self.push(out, Op::ConcatRows(a, b), &[a, b]))
    }

    /// Rows `start..end` of `x`.
    pub fn slice_rows(&mut self, x: Var, start: usize, end: usize) -> Result<Var> {
        let xv = self.value(x);
        if start > end || end > xv.rows() {
            return Err(Error::shape(
                "slice_rows",
                format!("{start}..{end} of {} rows", xv.rows()),
            ));
        }
        let c = xv.cols();
        let out = Tensor::new(end - start, c, xv.data()[start * c..end * c].to_vec())?;
        Ok(self.push(out, Op::SliceRows(x, start), &[x]))
    }

    /// Populates leaf gradients with `∂loss/∂leaf`, adding to any gradient
    /// already present.
    pub fn backward(&mut self, loss: Var) -> Result<()> {
        let lv = self.value(loss);
        if lv.shape() != [1, 1] {
            return Err(Error::shape("backward", format!("loss has shape {:?}", lv.shape())));
        }
        let mut grads: Vec<Option<Tensor<T>>> = (0..=loss.0).map(|_| None).collect();
        grads[loss.0] = Some(Tensor::scalar(T::one()));
        let mut leaf_grads: Vec<(usize, Tensor<T>)> = Vec::new();

        for id in (0..=loss.0).rev() {
            let Some(g) = grads[id].take() else { continue };
            let node = &self.nodes[id];
            if !node.requires_grad {
                continue;
            }
            let needs = |v: Var| self.nodes[v.0].requires_grad;
            let val = |v: Var| &self.nodes[v.0].value;
            match &node.op {
                Op::Leaf => leaf_grads.push((id, g)),
                Op::MatMul(a, b) => {
                    if needs(*a) {
                        accumulate(&mut grads, *a, kernels::matmul_nt(&g, val(*b))?)?;
                    }
                    if needs(*b) {
                        accumulate(&mut grads, *b, kernels::matmul_tn(val(*a), &g)?)?;
                    }
                }
                Op::SpMM(s, d) => accumulate(&mut grads, *d, kernels::spmm_t(s, &g)?)?,
                Op::Add(a, b) => {
                    if needs(*a) {
                        accumulate(&mut grads, *a, g.clone())?;
                    }
                    if needs(*b) {
                        accumulate(&mut grads, *b, g)?;
                    }
                }
                Op::AddBias(x, bias) => {
                    if needs(*bias) {
                        let mut db = Tensor::zeros(1, g.cols());
                        for r in 0..g.rows() {
                            for (o, &v) in db.data_mut().iter_mut().zip(g.row(r)) {
                                *o += v;
                            }
                        }
                        accumulate(&mut grads, *bias, db)?;
                    }
                    if needs(*x) {
                        accumulate(&mut grads, *x, g)?;
                    }
                }
                Op::Mul(a, b) => {
                    if needs(*a) {
                        let d = zip_map(&g, val(*b), |x, y| x * y);
                        accumulate(&mut grads, *a, d)?;
                    }
                    if needs(*b) {
                        let d = zip_map(&g, val(*a), |x, y| x * y);
                        accumulate(&mut grads, *b, d)?;
                    }
                }
                Op::ScaleRows(x, scale) => {
                    let mut d = g;
                    for (r, &s) in scale.iter().enumerate() {
                        for o in d.row_mut(r) {
                            *o *= s;
                        }
                    }
                    accumulate(&mut grads, *x, d)?;
                }
                Op::MulRows(s, x) => {
                    if needs(*s) {
                        let xv = val(*x);
                        let ds: Vec<T> = (0..g.rows())
                            .map(|r| g.row(r).iter().zip(xv.row(r)).map(|(&a, &b)| a * b).sum())
                            .collect();
                        accumulate(&mut grads, *s, Tensor::new(ds.len(), 1, ds)?)?;
                    }
                    if needs(*x) {
                        let sv = val(*s).data();
                        let mut d = g;
                        for (r, &k) in sv.iter().enumerate() {
                            for o in d.row_mut(r) {
                                *o *= k;
                            }
                        }
                        accumulate(&mut grads, *x, d)?;
                    }
                }
                Op::Activation(x, kind) => {
                    let (xv, yv) = (val(*x), &node.value);
                    let data = g
                        .data()
                        .iter()
                        .zip(xv.data().iter().zip(yv.data()))
                        .map(|(&gg, (&xx, &yy))| gg * kind.derivative(xx, yy))
                        .collect();
                    accumulate(&mut grads, *x, Tensor::new(g.rows(), g.cols(), data)?)?;
                }
                Op::Mask(x, mask) => {
                    let data = g.data().iter().zip(mask).map(|(&a, &m)| a * m).collect();
                    accumulate(&mut grads, *x, Tensor::new(g.rows(), g.cols(), data)?)?;
                }
                Op::SegmentSoftmax(x, segments) => {
                    let y = node.value.data();
                    let mut dots = vec![T::zero(); segments.count()];
                    for ((&grp, &gg), &yy) in segments.ids().iter().zip(g.data()).zip(y) {
                        dots[grp] += gg * yy;
                    }
                    let data = segments
                        .ids()
                        .iter()
                        .zip(g.data())
                        .zip(y)
                        .map(|((&grp, &gg), &yy)| yy * (gg - dots[grp]))
                        .collect();
                    accumulate(&mut grads, *x, Tensor::new(g.rows(), 1, data)?)?;
                }
                Op::RowLogSoftmax(x) => {
                    let y = &node.value;
                    let mut d = g;
                    for r in 0..d.rows() {
                        let total: T = d.row(r).iter().copied().sum();
                        for (o, &ly) in d.row_mut(r).iter_mut().zip(y.row(r)) {
                            *o -= ly.exp() * total;
                        }
                    }
                    accumulate(&mut grads, *x, d)?;
                }
                Op::MaskedNll { input, picks } => {
                    let shape = val(*input).shape();
                    let mut d = Tensor::zeros(shape[0], shape[1]);
                    let k = -g.data()[0] / T::of(picks.len() as f64);
                    for &(u, c) in picks {
                        let cur = d.get(u, c);
                        d.set(u, c, cur + k);
                    }
                    accumulate(&mut grads, *input, d)?;
                }
                Op::Sum(x) => {
                    let shape = val(*x).shape();
                    accumulate(&mut grads, *x, Tensor::filled(shape[0], shape[1], g.data()[0]))?;
                }
                Op::EdgeGather { left, right, edges } => {
                    if needs(*left) {
                        let mut d = vec![T::zero(); edges.num_dst()];
                        for (&dst, &gg) in edges.dst().iter().zip(g.data()) {
                            d[dst] += gg;
                        }
                        accumulate(&mut grads, *left, Tensor::new(d.len(), 1, d)?)?;
                    }
                    if needs(*right) {
                        let mut d = vec![T::zero(); edges.num_src()];
                        for (&src, &gg) in edges.src().iter().zip(g.data()) {
                            d[src] += gg;
                        }
                        accumulate(&mut grads, *right, Tensor::new(d.len(), 1, d)?)?;
                    }
                }
                Op::EdgeAggregate { weights, feats, edges } => {
                    let fv = val(*feats);
                    let f = fv.cols();
                    if needs(*weights) {
                        let dw: Vec<T> = edges
                            .dst()
                            .iter()
                            .zip(edges.src())
                            .map(|(&d, &s)| g.row(d).iter().zip(fv.row(s)).map(|(&a, &b)| a * b).sum())
                            .collect();
                        accumulate(&mut grads, *weights, Tensor::new(dw.len(), 1, dw)?)?;
                    }
                    if needs(*feats) {
                        let w = val(*weights).data();
                        let mut df = Tensor::zeros(edges.num_src(), f);
                        for (e, (&d, &s)) in edges.dst().iter().zip(edges.src()).enumerate() {
                            let we = w[e];
                            let grow = g.row(d);
                            for (o, &gg) in df.row_mut(s).iter_mut().zip(grow) {
                                *o += we * gg;
                            }
                        }
                        accumulate(&mut grads, *feats, df)?;
                    }
                }
                Op::ConcatRows(a, b) => {
                    let ra = val(*a).rows();
                    let c = g.cols();
                    if needs(*a) {
                        accumulate(&mut grads, *a, Tensor::new(ra, c, g.data()[..ra * c].to_vec())?)?;
                    }
                    if needs(*b) {
                        let rb = g.rows() - ra;
                        accumulate(&mut grads, *b, Tensor::new(rb, c, g.data()[ra * c..].to_vec())?)?;
                    }
                }
                Op::SliceRows(x, start) => {
                    let shape = val(*x).shape();
                    let mut d = Tensor::zeros(shape[0], shape[1]);
                    let c = shape[1];
                    d.data_mut()[start * c..start * c + g.len()].copy_from_slice(g.data());
                    accumulate(&mut grads, *x, d)?;
                }
            }
        }

        for (id, g) in leaf_grads {
            match &mut self.nodes[id].grad {
                Some(existing) => existing.add_assign(&g)?,
                slot @ None => *slot = Some(g),
            }
        }
        Ok(())
    }
}

fn accumulate<T: Real>(grads: &mut [Option<Tensor<T>>], v: Var, g: Tensor<T>) -> Result<()> {
    match &mut grads[v.0] {
        Some(existing) => existing.add_assign(&g),
        slot @ None => {
            *slot = Some(g);
            Ok(())
        }
    }
}

fn zip_map<T: Real>(a: &Tensor<T>, b: &Tensor<T>, f: impl Fn(T, T) -> T) -> Tensor<T> {
    let data = a.data().iter().zip(b.data()).map(|(&x, &y)| f(x, y)).collect();
    Tensor::new(a.rows(), a.cols(), data).expect("operands of equal shape")
}
