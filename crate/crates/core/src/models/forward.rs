use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Arch, Bound, GraphContext, ModelSpec, ParameterSet};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::{Tape, Tensor, Var};

/// Mode of a forward pass. Dropout draws from `rng` only when `training`.
pub struct Pass<'r> {
    pub training: bool,
    pub rng: &'r mut dyn RngCore,
}

impl<'r> Pass<'r> {
    pub fn train(rng: &'r mut dyn RngCore) -> Self {
        Self { training: true, rng }
    }

    pub fn eval(rng: &'r mut dyn RngCore) -> Self {
        Self { training: false, rng }
    }

    fn dropout<T: Real>(&mut self, tape: &mut Tape<T>, x: Var, rate: f64) -> Result<Var> {
        tape.dropout(x, rate, self.training, &mut *self.rng)
    }
}

/// `Z = relu(dropout(X)·W + b)`.
pub fn initial_transform<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    p: &Bound,
    x: Var,
    pass: &mut Pass,
) -> Result<Var> {
    let xd = pass.dropout(tape, x, spec.dropout_input)?;
    let xw = tape.matmul(xd, p.get("mlp.weight")?)?;
    let z = tape.add_bias(xw, p.get("mlp.bias")?)?;
    tape.relu(z)
}

/// `Hᵏ = A₁·dropout(Hᵏ⁺¹) + A₂Z` for `k = L-1 … 0`, starting from `Hᴸ = Z`.
pub fn gtcn_forward<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    z: Var,
    pass: &mut Pass,
) -> Result<Var> {
    tree_conv(tape, spec, ctx, None, z, pass)
}

/// GTAN propagation; every layer ends in ELU.
pub fn gtan_forward<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    p: &Bound,
    z: Var,
    pass: &mut Pass,
) -> Result<Var> {
    tree_attention(tape, spec, ctx, p, false, z, pass)
}

fn tree_conv<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    p: Option<&Bound>,
    z: Var,
    pass: &mut Pass,
) -> Result<Var> {
    check_rows(tape, z, ctx.num_nodes())?;
    let a2z = tape.scale_rows(z, &ctx.norm.a2_diag)?;
    let mut h = z;
    for k in 0..spec.hops {
        let hd = pass.dropout(tape, h, spec.dropout_prop)?;
        let msg = tape.spmm(&ctx.norm.a1, hd)?;
        h = tape.add(msg, a2z)?;
        if let Some(p) = p {
            h = tape.matmul(h, p.get(&format!("prop.{k}.weight"))?)?;
        }
    }
    Ok(h)
}

fn tree_attention<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    p: &Bound,
    transform: bool,
    z: Var,
    pass: &mut Pass,
) -> Result<Var> {
    check_rows(tape, z, ctx.num_nodes())?;
    let f = tape.value(z).cols();
    let mut h = z;
    for k in 0..spec.hops {
        let att = p.get(&format!("prop.{k}.att"))?;
        let wl = tape.slice_rows(att, 0, f)?;
        let wr = tape.slice_rows(att, f, 2 * f)?;
        // The left half of every score reads z_u, never the hidden map.
        let left = tape.matmul(z, wl)?;
        let stacked = tape.concat_rows(h, z)?;
        let right = tape.matmul(stacked, wr)?;
        let scores = tape.edge_gather(left, right, &ctx.tree)?;
        let scores = tape.leaky_relu(scores)?;
        let alpha = tape.segment_softmax(scores, ctx.tree.segments())?;
        let alpha = pass.dropout(tape, alpha, spec.dropout_prop)?;
        let mut agg = tape.edge_aggregate(alpha, stacked, &ctx.tree)?;
        if transform {
            agg = tape.matmul(agg, p.get(&format!("prop.{k}.weight"))?)?;
        }
        h = tape.elu(agg)?;
    }
    Ok(h)
}

/// Single-head attention over `𝒩(u) ∪ {u}` with scores from `[h_u ∥ h_v]·a`.
fn neighbor_attention<T: Real>(
    tape: &mut Tape<T>,
    ctx: &GraphContext<T>,
    h: Var,
    att: Var,
    rate: f64,
    pass: &mut Pass,
) -> Result<Var> {
    let f = tape.value(h).cols();
    let al = tape.slice_rows(att, 0, f)?;
    let ar = tape.slice_rows(att, f, 2 * f)?;
    let left = tape.matmul(h, al)?;
    let right = tape.matmul(h, ar)?;
    let scores = tape.edge_gather(left, right, &ctx.attention)?;
    let scores = tape.leaky_relu(scores)?;
    let alpha = tape.segment_softmax(scores, ctx.attention.segments())?;
    let alpha = pass.dropout(tape, alpha, rate)?;
    tape.edge_aggregate(alpha, h, &ctx.attention)
}

/// Vanilla GCN; returns class logits (no nonlinearity on the last layer).
pub fn gcn_forward<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    p: &Bound,
    x: Var,
    pass: &mut Pass,
) -> Result<Var> {
    check_rows(tape, x, ctx.num_nodes())?;
    let mut h = x;
    for n in 0..spec.hops {
        let hd = pass.dropout(tape, h, spec.dropout_input)?;
        let hw = tape.matmul(hd, p.get(&format!("layers.{n}.weight"))?)?;
        let agg = tape.spmm(&ctx.norm.a_hat, hw)?;
        h = tape.add_bias(agg, p.get(&format!("layers.{n}.bias"))?)?;
        if n + 1 < spec.hops {
            h = tape.relu(h)?;
        }
    }
    Ok(h)
}

/// Single-head GAT; returns class logits (no ELU on the last layer).
pub fn gat_forward<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    p: &Bound,
    x: Var,
    pass: &mut Pass,
) -> Result<Var> {
    check_rows(tape, x, ctx.num_nodes())?;
    let mut h = x;
    for n in 0..spec.hops {
        let hd = pass.dropout(tape, h, spec.dropout_input)?;
        let hw = tape.matmul(hd, p.get(&format!("layers.{n}.weight"))?)?;
        let att = p.get(&format!("layers.{n}.att"))?;
        let agg = neighbor_attention(tape, ctx, hw, att, spec.dropout_prop, pass)?;
        h = tape.add_bias(agg, p.get(&format!("layers.{n}.bias"))?)?;
        if n + 1 < spec.hops {
            h = tape.elu(h)?;
        }
    }
    Ok(h)
}

/// Propagation of the four ablation variants, from `Z` to `H⁰`.
pub fn variant_forward<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    p: &Bound,
    z: Var,
    pass: &mut Pass,
) -> Result<Var> {
    check_rows(tape, z, ctx.num_nodes())?;
    match spec.arch {
        Arch::SimpleGcn => {
            let mut h = z;
            for _ in 0..spec.hops {
                let hd = pass.dropout(tape, h, spec.dropout_prop)?;
                let agg = tape.spmm(&ctx.norm.a_hat, hd)?;
                h = tape.relu(agg)?;
            }
            Ok(h)
        }
        Arch::SimpleGat => {
            let mut h = z;
            for k in 0..spec.hops {
                let att = p.get(&format!("prop.{k}.att"))?;
                let agg = neighbor_attention(tape, ctx, h, att, spec.dropout_prop, pass)?;
                h = tape.elu(agg)?;
            }
            Ok(h)
        }
        Arch::Gtcn2 => tree_conv(tape, spec, ctx, Some(p), z, pass),
        Arch::Gtan2 => tree_attention(tape, spec, ctx, p, true, z, pass),
        other => Err(Error::Param(format!("{other} is not an ablation variant"))),
    }
}

/// `log_softmax(H⁰·W₀)`.
pub fn classify<T: Real>(tape: &mut Tape<T>, p: &Bound, h: Var) -> Result<Var> {
    let logits = tape.matmul(h, p.get("out.weight")?)?;
    tape.row_log_softmax(logits)
}

/// Full model: per-node class log-probabilities.
pub fn forward<T: Real>(
    tape: &mut Tape<T>,
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    p: &Bound,
    x: Var,
    pass: &mut Pass,
) -> Result<Var> {
    let logits = match spec.arch {
        Arch::Gcn => gcn_forward(tape, spec, ctx, p, x, pass)?,
        Arch::Gat => gat_forward(tape, spec, ctx, p, x, pass)?,
        arch => {
            let z = initial_transform(tape, spec, p, x, pass)?;
            let h = match arch {
                Arch::Gtcn => gtcn_forward(tape, spec, ctx, z, pass)?,
                Arch::Gtan => gtan_forward(tape, spec, ctx, p, z, pass)?,
                _ => variant_forward(tape, spec, ctx, p, z, pass)?,
            };
            return classify(tape, p, h);
        }
    };
    tape.row_log_softmax(logits)
}

/// Inference-mode log-probabilities on a fresh tape.
pub fn infer<T: Real>(
    spec: &ModelSpec,
    ctx: &GraphContext<T>,
    params: &ParameterSet<T>,
    x: &Tensor<T>,
) -> Result<Tensor<T>> {
    let mut tape = Tape::new();
    let p = params.bind_frozen(&mut tape);
    let xv = tape.constant(x.clone());
    let mut rng = ChaCha8Rng::seed_from_u64(0);
    let out = forward(&mut tape, spec, ctx, &p, xv, &mut Pass::eval(&mut rng))?;
    Ok(tape.value(out).clone())
}

fn check_rows<T: Real>(tape: &Tape<T>, x: Var, n: usize) -> Result<()> {
    let rows = tape.value(x).rows();
    if rows != n {
        return Err(Error::shape("forward", format!("{rows} feature rows for {n} nodes")));
    }
    Ok(())
}
