use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{Arch, ModelSpec};
use crate::error::{Error, Result};
use crate::scalar::Real;
use crate::tensor::{Tape, Tensor, Var};

/// Named trainable arrays in a fixed order.
#[derive(Clone, Debug, PartialEq)]
pub struct ParameterSet<T> {
    entries: Vec<(String, Tensor<T>)>,
}

/// `(name, rows, cols)` for every array the architecture needs, in order.
pub(crate) fn layout(spec: &ModelSpec) -> Vec<(String, usize, usize)> {
    let (d, f, c, l) = (spec.in_dim, spec.hidden, spec.classes, spec.hops);
    let mut out = Vec::new();
    match spec.arch {
        Arch::Gcn | Arch::Gat => {
            for n in 0..l {
                let fan_in = if n == 0 { d } else { f };
                let fan_out = if n + 1 == l { c } else { f };
                out.push((format!("layers.{n}.weight"), fan_in, fan_out));
                if spec.arch == Arch::Gat {
                    out.push((format!("layers.{n}.att"), 2 * fan_out, 1));
                }
                out.push((format!("layers.{n}.bias"), 1, fan_out));
            }
        }
        arch => {
            out.push(("mlp.weight".into(), d, f));
            out.push(("mlp.bias".into(), 1, f));
            for k in 0..l {
                if arch.uses_attention() {
                    out.push((format!("prop.{k}.att"), 2 * f, 1));
                }
                if matches!(arch, Arch::Gtcn2 | Arch::Gtan2) {
                    out.push((format!("prop.{k}.weight"), f, f));
                }
            }
            out.push(("out.weight".into(), f, c));
        }
    }
    out
}

impl<T: Real> ParameterSet<T> {
    /// Glorot-uniform weights and attention vectors, zero biases.
    pub fn init(spec: &ModelSpec, seed: u64) -> Result<Self> {
        spec.validate()?;
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let entries = layout(spec)
            .into_iter()
            .map(|(name, r, c)| {
                let value = if name.ends_with(".bias") {
                    Tensor::zeros(r, c)
                } else {
                    let bound = (6.0 / (r + c) as f64).sqrt();
                    Tensor::from_fn(r, c, |_, _| T::of(rng.random_range(-bound..=bound)))
                };
                (name, value)
            })
            .collect();
        Ok(Self { entries })
    }

    /// Checks that `entries` match the architecture exactly, then wraps them.
    pub fn from_entries(spec: &ModelSpec, entries: Vec<(String, Tensor<T>)>) -> Result<Self> {
        let expected = layout(spec);
        if expected.len() != entries.len() {
            return Err(Error::Param(format!(
                "{} expects {} parameter arrays, got {}",
                spec.arch,
                expected.len(),
                entries.len()
            )));
        }
        for ((name, r, c), (got, t)) in expected.iter().zip(&entries) {
            if name != got || t.shape() != [*r, *c] {
                return Err(Error::Param(format!(
                    "expected {name} {r}x{c}, got {got} {}x{}",
                    t.rows(),
                    t.cols()
                )));
            }
            t.check_finite(got)?;
        }
        Ok(Self { entries })
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn entries(&self) -> &[(String, Tensor<T>)] {
        &self.entries
    }

    pub fn get(&self, name: &str) -> Option<&Tensor<T>> {
        self.entries.iter().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn get_mut(&mut self, name: &str) -> Option<&mut Tensor<T>> {
        self.entries.iter_mut().find(|(n, _)| n == name).map(|(_, t)| t)
    }

    pub fn tensors_mut(&mut self) -> impl Iterator<Item = &mut Tensor<T>> {
        self.entries.iter_mut().map(|(_, t)| t)
    }

    pub fn num_scalars(&self) -> usize {
        self.entries.iter().map(|(_, t)| t.len()).sum()
    }

    pub fn cast<U: Real>(&self) -> ParameterSet<U> {
        ParameterSet {
            entries: self.entries.iter().map(|(n, t)| (n.clone(), t.cast())).collect(),
        }
    }

    /// Records every array on `tape` as a trainable leaf.
    pub fn bind(&self, tape: &mut Tape<T>) -> Bound {
        self.bind_with(tape, true)
    }

    /// Records every array as a constant (no gradients).
    pub fn bind_frozen(&self, tape: &mut Tape<T>) -> Bound {
        self.bind_with(tape, false)
    }

    fn bind_with(&self, tape: &mut Tape<T>, requires_grad: bool) -> Bound {
        Bound {
            vars: self
                .entries
                .iter()
                .map(|(n, t)| (n.clone(), tape.leaf(t.clone(), requires_grad)))
                .collect(),
        }
    }
}

/// Parameter handles on a tape, in [`ParameterSet`] order.
#[derive(Clone, Debug)]
pub struct Bound {
    vars: Vec<(String, Var)>,
}

impl Bound {
    /// Wraps handles created elsewhere, e.g. by a gradient check.
    pub fn from_vars(names: &[String], vars: &[Var]) -> Self {
        Self {
            vars: names.iter().cloned().zip(vars.iter().copied()).collect(),
        }
    }

    pub fn get(&self, name: &str) -> Result<Var> {
        self.vars
            .iter()
            .find(|(n, _)| n == name)
            .map(|&(_, v)| v)
            .ok_or_else(|| Error::Param(format!("missing parameter '{name}'")))
    }

    pub fn vars(&self) -> impl Iterator<Item = Var> + '_ {
        self.vars.iter().map(|&(_, v)| v)
    }
}
